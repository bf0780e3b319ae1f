from django.conf import settings

DEFAULTS = {
    "BOUND": 3,
    "DEPTH": 4,
    "SEED": 0,
    "FORMAT": "text",
    "POINTS": 20,
    "CONJUGATIONS": 5,
    "CHUNK_SIZE": 64,
    "LINKS": 4,
}


def engine_setting(name: str):
    """An entry of settings.NCPN, falling back to the engine default."""
    return getattr(settings, "NCPN", {}).get(name, DEFAULTS[name])
