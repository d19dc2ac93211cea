import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra import numpy as hnp

from oracles import brute_bfs, brute_force_scan, brute_frontiers
from teamexplore.errors import ConfigurationError, DomainError
from teamexplore.world import (
    FREE,
    OBSTACLE,
    UNKNOWN,
    OccupancyGrid,
    ScanResult,
    ScenarioConfig,
    build_world,
    detect_frontiers,
    exploration_ratio,
    generate_maze,
    generate_random_obstacles,
    integrate_scan,
    merge_maps,
    raycast_scan,
    reachable_free_cells,
)
from teamexplore.world.analysis import reachable_mask
from teamexplore.world.sensing import beam_count


def grid_of(cells, res=1.0):
    cells = np.asarray(cells, dtype=np.uint8)
    return OccupancyGrid(cells.shape[1], cells.shape[0], res, cells)


beliefs = st.integers(1, 64).flatmap(
    lambda h: st.integers(1, 64).flatmap(
        lambda w: hnp.arrays(np.uint8, (h, w), elements=st.sampled_from([0, 1, 2]))
    )
)


# --- grid ----------------------------------------------------------------------

def test_grid_indexing_and_centers():
    g = OccupancyGrid.filled(5, 3, 0.5)
    assert g.shape == (3, 5)
    assert g.cell_of(1.2, 0.7) == (1, 2)
    assert g.index_of(1.2, 0.7) == 7
    assert g.center_of(7) == (1.25, 0.75)
    assert g.contains(2.49, 1.49) and not g.contains(2.5, 0.0)


def test_grid_is_immutable_and_validated():
    g = OccupancyGrid.filled(4, 4, 1.0)
    with pytest.raises(ValueError):
        g.cells[0, 0] = 1
    with pytest.raises(DomainError):
        OccupancyGrid(4, 4, 1.0, np.full((4, 4), 7, dtype=np.uint8))
    with pytest.raises(DomainError):
        OccupancyGrid(4, 4, 0.0, np.zeros((4, 4), dtype=np.uint8))


def test_grid_binary_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    g = grid_of(rng.integers(0, 3, size=(7, 9)), res=0.25)
    assert OccupancyGrid.from_bytes(g.to_bytes()) == g
    g.save(tmp_path / "g.grid")
    assert OccupancyGrid.load(tmp_path / "g.grid") == g
    with pytest.raises(DomainError):
        OccupancyGrid.from_bytes(b"XXXXXX" + g.to_bytes()[6:])
    with pytest.raises(DomainError):
        OccupancyGrid.from_bytes(g.to_bytes()[:-1])


def test_pgm_has_header_and_one_byte_per_cell():
    g = grid_of([[0, 1], [2, 1]])
    data = g.to_pgm()
    assert data.startswith(b"P5\n2 2\n255\n")
    # top image row is the highest y row
    assert data[-4:] == bytes([0, 255, 128, 255])


# --- generators ----------------------------------------------------------------

def test_maze_connected_and_deterministic():
    g = generate_maze(1, 125, 1, corridor_width=3)
    assert g.shape == (125, 125)
    free = np.argwhere(g.cells == FREE)
    start = tuple(free[0])
    # independent flood fill reaches every free cell
    assert len(brute_bfs(g.cells == FREE, start)) == len(free)
    assert generate_maze(1, 125, 1, corridor_width=3) == g
    assert generate_maze(2, 125, 1, corridor_width=3) != g


def test_maze_degenerate_room_when_corridor_too_wide():
    g = generate_maze(5, 20, 1, corridor_width=20)
    assert np.all(g.cells[1:-1, 1:-1] == FREE)
    assert np.all(g.cells[0] == OBSTACLE) and np.all(g.cells[:, -1] == OBSTACLE)


def test_maze_rejects_bad_geometry():
    with pytest.raises(ConfigurationError):
        generate_maze(0, 10.5, 1.0)
    with pytest.raises(ConfigurationError):
        generate_maze(0, 125, 1, corridor_width=1)


def test_random_obstacles_density_and_connectivity():
    g = generate_random_obstacles(3, 125, 1, density=0.2)
    frac = np.count_nonzero(g.cells == OBSTACLE) / g.cells.size
    assert 0.1 <= frac <= 0.3
    free = np.argwhere(g.cells == FREE)
    assert len(brute_bfs(g.cells == FREE, tuple(free[0]))) == len(free)
    assert generate_random_obstacles(3, 125, 1, density=0.2) == g


def test_random_obstacles_zero_density_is_empty_room():
    g = generate_random_obstacles(9, 30, 1, density=0.0)
    assert np.all(g.cells[1:-1, 1:-1] == FREE)
    with pytest.raises(ConfigurationError):
        generate_random_obstacles(9, 30, 1, density=0.6)


@pytest.mark.parametrize("kind", ["maze", "random_obstacle"])
def test_build_world_uses_scenario(kind):
    sc = ScenarioConfig.for_kind(kind, seed=4, side_length=40)
    assert build_world(sc) == build_world(sc)
    assert build_world(sc).shape == (40, 40)


def test_scenario_task_parameters():
    maze = ScenarioConfig.for_kind("maze")
    ro = ScenarioConfig.for_kind("random_obstacle")
    assert (maze.global_step_budget, maze.local_steps_per_decision, maze.lidar_range, maze.dt) == (30, 20, 10.0, 0.1)
    assert (ro.global_step_budget, ro.local_steps_per_decision, ro.lidar_range, ro.dt) == (30, 30, 12.0, 0.1)
    assert ScenarioConfig.from_dict(maze.to_dict()) == maze


# --- sensing -------------------------------------------------------------------

def test_beam_count():
    assert beam_count(math.pi / 180) == 360
    assert beam_count(2 * math.pi) == 1
    with pytest.raises(DomainError):
        beam_count(0)


def test_scan_open_space_is_disc(room20):
    open_grid = OccupancyGrid.filled(40, 40, 1.0, 1)
    scan = raycast_scan(open_grid, (20.5, 20.5, 0.0), 8.0)
    assert scan.obstacle_cells.size == 0
    rows, cols = np.divmod(scan.freed_cells, 40)
    d = np.hypot(cols + 0.5 - 20.5, rows + 0.5 - 20.5)
    # every freed cell touches the range disc; every cell well inside is freed
    assert d.max() <= 8.0 + math.sqrt(0.5)
    inner = {(r, c) for r in range(40) for c in range(40) if math.hypot(c + 0.5 - 20.5, r + 0.5 - 20.5) <= 6.0}
    assert inner <= set(zip(rows.tolist(), cols.tolist()))


def test_scan_range_zero_frees_own_cell(room20):
    scan = raycast_scan(room20, (5.3, 7.8, 1.0), 0.0)
    assert scan.freed_cells.tolist() == [7 * 20 + 5]
    assert scan.obstacle_cells.size == 0


def test_scan_wall_blocks_view():
    cells = np.ones((20, 20), dtype=np.uint8)
    cells[0, :] = cells[-1, :] = cells[:, 0] = cells[:, -1] = OBSTACLE
    cells[1:19, 10] = OBSTACLE
    g = grid_of(cells)
    scan = raycast_scan(g, (8.5, 10.5, 0.0), 15.0)
    cols = scan.freed_cells % 20
    assert cols.max() < 10
    assert 10 * 20 + 10 in set(scan.obstacle_cells.tolist())
    f, h = brute_force_scan(cells, 1.0, 8.5, 10.5, 0.0, 15.0, 360)
    assert set(scan.freed_cells.tolist()) == f
    assert set(scan.obstacle_cells.tolist()) == h


def test_scan_errors(room20):
    with pytest.raises(DomainError):
        raycast_scan(room20, (25.0, 1.0, 0.0), 5.0)
    with pytest.raises(DomainError):
        raycast_scan(room20, (5.0, 5.0, 0.0), -1.0)


@given(
    seed=st.integers(0, 2**32 - 1),
    size=st.integers(5, 32),
    density=st.floats(0.0, 0.4),
    res=st.sampled_from([1.0, 0.5, 0.25]),
    heading=st.floats(-math.pi, math.pi),
    rng_range=st.floats(0.0, 14.0),
    offset=st.tuples(st.floats(0.05, 0.95), st.floats(0.05, 0.95)),
)
def test_scan_matches_brute_force_visibility(seed, size, density, res, heading, rng_range, offset):
    # a range ending exactly on a grid line is decided by the last ulp; skip those
    for o in offset:
        for d in (o, 1.0 - o):
            frac = (rng_range - d) % 1.0
            assume(1e-6 < frac < 1.0 - 1e-6)
    rng = np.random.default_rng(seed)
    cells = np.where(rng.random((size, size)) < density, OBSTACLE, FREE).astype(np.uint8)
    cells[0, :] = cells[-1, :] = cells[:, 0] = cells[:, -1] = OBSTACLE
    r, c = size // 2, size // 2
    cells[r, c] = FREE
    x, y = (c + offset[0]) * res, (r + offset[1]) * res
    scan = raycast_scan(grid_of(cells, res), (x, y, heading), rng_range * res, math.pi / 90)
    f, h = brute_force_scan(cells, res, x, y, heading, rng_range * res, 180)
    assert set(scan.freed_cells.tolist()) == f
    assert set(scan.obstacle_cells.tolist()) == h
    # nothing freed is an obstacle, every hit is one
    assert np.all(cells.reshape(-1)[scan.freed_cells] == FREE)
    assert np.all(cells.reshape(-1)[scan.obstacle_cells] == OBSTACLE)


def test_integrate_scan_rules():
    belief = grid_of([[0, 1, 2]])
    assert integrate_scan(belief, ScanResult.empty(3, 1)) == belief
    again = ScanResult(3, 1, np.array([1]), np.array([2]))
    assert integrate_scan(belief, again) == belief
    # a cell seen free then as an obstacle ends up an obstacle, and never reverts
    conflict = ScanResult(3, 1, np.array([0, 2]), np.array([1]))
    out = integrate_scan(belief, conflict)
    assert out.cells.tolist() == [[1, 2, 2]]
    with pytest.raises(DomainError):
        integrate_scan(belief, ScanResult.empty(2, 1))


def test_scan_union():
    a = ScanResult(3, 1, np.array([0]), np.array([2]))
    b = ScanResult(3, 1, np.array([1]), np.array([2]))
    u = a.union(b)
    assert u.freed_cells.tolist() == [0, 1] and u.obstacle_cells.tolist() == [2]
    assert u.observed_cells.tolist() == [0, 1, 2]


# --- analysis ------------------------------------------------------------------

def test_merge_identity_idempotence_and_disjoint_halves():
    rng = np.random.default_rng(2)
    b = grid_of(rng.integers(0, 3, size=(6, 6)))
    unknown = OccupancyGrid.filled(6, 6, 1.0)
    assert merge_maps([b, unknown]) == b
    assert merge_maps([b, b]) == b
    left = np.zeros((6, 6), dtype=np.uint8)
    right = np.zeros((6, 6), dtype=np.uint8)
    left[:, :3] = 1
    right[:, 3:] = 2
    m = merge_maps([grid_of(left), grid_of(right)])
    assert np.count_nonzero(m.known_mask()) == 18 + 18
    with pytest.raises(DomainError):
        merge_maps([b, OccupancyGrid.filled(5, 6, 1.0)])
    with pytest.raises(DomainError):
        merge_maps([])


@given(a=hnp.arrays(np.uint8, (8, 8), elements=st.sampled_from([0, 1, 2])),
       b=hnp.arrays(np.uint8, (8, 8), elements=st.sampled_from([0, 1, 2])),
       c=hnp.arrays(np.uint8, (8, 8), elements=st.sampled_from([0, 1, 2])))
def test_merge_is_a_lattice_join(a, b, c):
    A, B, C = grid_of(a), grid_of(b), grid_of(c)
    assert merge_maps([A, B]) == merge_maps([B, A])
    assert merge_maps([merge_maps([A, B]), C]) == merge_maps([A, merge_maps([B, C])])
    assert merge_maps([A, A]) == A
    reach = np.ones(64, dtype=bool)
    assert exploration_ratio(merge_maps([A, B]), reach) >= max(exploration_ratio(A, reach), exploration_ratio(B, reach))


def test_frontiers_simple_cases():
    assert detect_frontiers(OccupancyGrid.filled(5, 5, 1.0, 1)) == frozenset()
    assert detect_frontiers(OccupancyGrid.filled(5, 5, 1.0, 0)) == frozenset()
    corridor = np.zeros((3, 10), dtype=np.uint8)
    corridor[:, :4] = FREE
    corridor[0, :] = corridor[2, :] = OBSTACLE
    corridor[0, 6:] = corridor[2, 6:] = UNKNOWN
    assert detect_frontiers(grid_of(corridor)) == frozenset({1 * 10 + 3})


@given(cells=beliefs, conn=st.sampled_from([4, 8]))
def test_frontiers_match_brute_force(cells, conn):
    assert detect_frontiers(grid_of(cells), conn) == brute_frontiers(cells, conn)


def test_reachable_free_cells_cases():
    room = OccupancyGrid.filled(6, 5, 1.0, 1)
    assert reachable_free_cells(room, (2, 2)) == frozenset(range(30))
    cells = np.ones((5, 7), dtype=np.uint8)
    cells[:, 3] = OBSTACLE
    sealed = grid_of(cells)
    left = reachable_free_cells(sealed, 0)
    assert left == frozenset(r * 7 + c for r in range(5) for c in range(3))
    with pytest.raises(DomainError):
        reachable_free_cells(sealed, (0, 3))


def test_reachable_matches_independent_bfs_on_maze():
    maze = generate_maze(7, 40, 1, corridor_width=3, wall_thickness=1)
    start = tuple(np.argwhere(maze.cells == FREE)[0])
    expected = {r * 40 + c for r, c in brute_bfs(maze.cells == FREE, start)}
    assert reachable_free_cells(maze, start) == expected


def test_exploration_ratio_values():
    reach = frozenset(range(100))
    assert exploration_ratio(OccupancyGrid.filled(10, 10, 1.0), reach) == 0.0
    assert exploration_ratio(OccupancyGrid.filled(10, 10, 1.0, 1), reach) == 1.0
    half = np.zeros((10, 10), dtype=np.uint8)
    half[:5] = FREE
    assert exploration_ratio(grid_of(half), reach) == 0.5
    with pytest.raises(DomainError):
        exploration_ratio(grid_of(half), frozenset())


@given(seed=st.integers(0, 2**16), steps=st.integers(1, 6))
def test_exploration_ratio_monotone_under_scans(seed, steps):
    rng = np.random.default_rng(seed)
    cells = np.where(rng.random((24, 24)) < 0.2, OBSTACLE, FREE).astype(np.uint8)
    cells[12, 12] = FREE
    truth = grid_of(cells)
    reach = reachable_mask(truth.cells, 12, 12)
    belief = OccupancyGrid.filled(24, 24, 1.0)
    last = exploration_ratio(belief, reach)
    for _ in range(steps):
        free = np.argwhere(cells == FREE)
        r, c = free[rng.integers(len(free))]
        belief = integrate_scan(belief, raycast_scan(truth, (c + 0.5, r + 0.5, 0.0), 6.0))
        er = exploration_ratio(belief, reach)
        assert er >= last
        last = er
