"""stopwords.py - the shipped English stop-word list.

Function words only. Content-bearing words that carry an intent (oh, well, get,
have, would, one, am, ...) are deliberately absent."""

from __future__ import annotations

STOPWORDS: frozenset[str] = frozenset(
    """
    a about above across after again against all along also although among an and another any anyone
    anything are around as at
    be because been before being below beside besides between beyond both but by
    ca can did do does doing done down during
    each either else even ever every
    few for from further
    had has having he hence her here hers herself him himself his how however
    i if in into is it its itself
    just
    let me mine more most my myself
    no nor not now
    of off on once only or other others our ours ourselves out over own
    per
    quite
    rather
    said same shall she should since so some such
    than that the their theirs them themselves then there these they this those though through
    throughout thus to too
    toward towards
    under unless until up upon us
    very via
    was we were what whatever when whenever where wherever whether which while who whoever whom whose
    why will with within
    without wo
    yet you your yours yourself yourselves
    s t d ll m re ve y o
    im ive youre thats dont didnt cant isnt arent wasnt werent doesnt hasnt havent hadnt
    wont wouldnt couldnt shouldnt
    """.split()
)
