from ._choisim import *  # noqa: F401,F403
