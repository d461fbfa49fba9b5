"""Canonical label sets shared by every stage of the pipeline.

Stance order doubles as the deterministic argmax tie-break order; issues
are kept alphabetical for the same reason.
"""

STANCES = ("pro-biden", "pro-trump", "anti-biden", "anti-trump")

ISSUES = (
    "abortion",
    "climate",
    "covid",
    "criminal justice reform, race, law & order",
    "economy and taxes",
    "education",
    "foreign policy",
    "guns",
    "healthcare",
    "immigration",
    "lgbtq",
    "supreme court",
    "terrorism",
)

STANCE_INDEX = {s: i for i, s in enumerate(STANCES)}
ISSUE_INDEX = {s: i for i, s in enumerate(ISSUES)}

# Majority-vote view of an entity: each predicted ad stance votes L or C.
LIBERAL_STANCES = frozenset({"pro-biden", "anti-trump"})
CONSERVATIVE_STANCES = frozenset({"pro-trump", "anti-biden"})

CANDIDATES = ("trump", "biden")


def opponent(candidate: str) -> str:
    if candidate not in CANDIDATES:
        raise ValueError(f"unknown candidate: {candidate!r}")
    return "biden" if candidate == "trump" else "trump"


def stance_label(polarity: str, candidate: str) -> str:
    """Compose a stance label, validating both parts."""
    if polarity not in ("pro", "anti"):
        raise ValueError(f"unknown polarity: {polarity!r}")
    if candidate not in CANDIDATES:
        raise ValueError(f"unknown candidate: {candidate!r}")
    return f"{polarity}-{candidate}"


def stance_side(stance: str) -> str:
    """Side of the candidate a stance talks about: 'trump-side' or 'biden-side'."""
    if stance not in STANCES:
        raise ValueError(f"unknown stance: {stance!r}")
    return "trump-side" if stance.endswith("trump") else "biden-side"
