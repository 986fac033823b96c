"""Single-position tree mutations for the class characterisation tests."""

from treesub.trees import LEAF, node, trees_up_to

_POOL = trees_up_to(4)


def positions(t, path=()):
    yield path
    if t.left is not None:
        yield from positions(t.left, path + (0,))
        yield from positions(t.right, path + (1,))


def at(t, path):
    for p in path:
        t = t.right if p else t.left
    return t


def replace(t, path, new):
    if not path:
        return new
    if path[0]:
        return node(t.left, replace(t.right, path[1:], new))
    return node(replace(t.left, path[1:], new), t.right)


def mutate(t, rng):
    """Replace one randomly chosen subtree occurrence by a different tree."""
    paths = list(positions(t))
    path = rng.choice(paths)
    old = at(t, path)
    choice = rng.random()
    if choice < 0.3 and old.left is not None:
        new = old.left if rng.random() < 0.5 else old.right
    elif choice < 0.6:
        new = node(old, LEAF) if rng.random() < 0.5 else node(LEAF, old)
    else:
        new = rng.choice(_POOL)
    if new is old:
        new = node(old, old)
    return replace(t, path, new)
