import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from groupform import LatticeState, TorusShape

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def torus_shapes(draw, max_side_1d=16, max_side_2d=8):
    if draw(st.integers(1, 2)) == 1:
        dims = (draw(st.integers(3, max_side_1d)),)
    else:
        dims = (draw(st.integers(3, max_side_2d)), draw(st.integers(3, max_side_2d)))
    return TorusShape(dims)


@st.composite
def lattice_states(draw, max_value=3, **shape_kwargs):
    shape = draw(torus_shapes(**shape_kwargs))
    values = draw(
        st.lists(
            st.integers(0, max_value),
            min_size=shape.total_cells,
            max_size=shape.total_cells,
        )
    )
    return LatticeState(shape, np.asarray(values, dtype=np.int64).reshape(shape.dims))


@st.composite
def offsets_for(draw, shape, span=25):
    return tuple(draw(st.integers(-span, span)) for _ in shape.dims)
