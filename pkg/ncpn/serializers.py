from fractions import Fraction

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from .exceptions import NcpnError
from .representation import DimVector, RepPoint


class DetailSerializer(serializers.Serializer):
    name = serializers.CharField()
    verdict = serializers.BooleanField(default=True)
    value = serializers.CharField(allow_null=True, required=False)


class ReportSerializer(serializers.Serializer):
    """
    Serializer for check reports, schema 1.
    """
    schema = serializers.IntegerField(read_only=True)
    check = serializers.CharField()
    params = serializers.DictField()
    verdict = serializers.BooleanField()
    residue = serializers.CharField(allow_null=True)
    elapsed_ms = serializers.IntegerField(allow_null=True)
    details = DetailSerializer(many=True)


class TermSerializer(serializers.Serializer):
    """One term of a word combination: {coeff: "num/den", word: [letters]}."""
    coeff = serializers.SerializerMethodField()
    word = serializers.SerializerMethodField()

    def get_coeff(self, term) -> str:
        return _rational_text(term[1])

    def get_word(self, term):
        return [str(letter) for letter in term[0]]


def terms_data(value):
    """Terms of any word combination in canonical order."""
    return TermSerializer(list(value), many=True).data


class RepPointSerializer(serializers.Serializer):
    """
    Serializer for representation points: {dim: {vertex: n}, matrices: {arrow: [["p/q"]]}}.

    The quiver is passed in the serializer context.
    """
    dim = serializers.DictField(child=serializers.IntegerField(min_value=0))
    matrices = serializers.DictField(
        child=serializers.ListField(child=serializers.ListField(child=serializers.CharField()))
    )

    def to_representation(self, point: RepPoint):
        return {
            "dim": point.dim.as_mapping(),
            "matrices": {
                name: [[_rational_text(v) for v in row] for row in rows]
                for name, rows in point.to_rows().items()
            },
        }

    def validate_matrices(self, value):
        try:
            return {
                name: [[Fraction(entry) for entry in row] for row in rows]
                for name, rows in value.items()
            }
        except (ValueError, ZeroDivisionError) as exc:
            raise serializers.ValidationError(f"Invalid rational entry: {exc}")

    def validate(self, data):
        quiver = self.context["quiver"]
        try:
            dim = DimVector.from_mapping(quiver, data["dim"])
            data["point"] = RepPoint.from_rows(dim, data["matrices"])
        except NcpnError as exc:
            raise serializers.ValidationError(str(exc))
        return data


def _rational_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def render_json(data) -> str:
    return JSONRenderer().render(data).decode("utf-8")
