"""Hand-built episode logs with known metric values."""

from teamexplore.sim import SCHEMA_VERSION, EpisodeLog


def make_log(er_series, reward_totals, step_len=0.5, seed=0):
    """Log whose agents each move ``step_len`` metres along x per movement step.

    ``reward_totals[i]`` becomes agent i's combined reward for a single
    decision, so the per-agent cumulative rewards are exactly those values.
    """
    n = len(reward_totals)
    steps = []
    for k, er in enumerate(er_series):
        agents = [[k * step_len, 2.0 * i, 0.0, 0.0, 0.0, 0.0, False] for i in range(n)]
        steps.append({"k": k, "decision": 0 if k else -1, "er": float(er), "agents": agents})
    decision = {
        "index": 0,
        "start_step": 0,
        "end_step": len(er_series) - 1,
        "goals": [None] * n,
        "actions": [None] * n,
        "deliveries": [],
        "rewards": [{"combined": float(t)} for t in reward_totals],
        "er": float(er_series[-1]),
    }
    return EpisodeLog(
        header={"schema_version": SCHEMA_VERSION, "config": {"n_agents": n, "seed": seed}},
        steps=steps,
        decisions=[decision],
        summary={"status": "Timeout", "final_er": float(er_series[-1])},
    )


def ramp(final, first_hit=None, tau=0.85, length=None):
    """ER series sitting at 0.1 until step ``first_hit`` where it jumps to ``tau``, ending at ``final``."""
    length = length or (first_hit or 0) + 50
    out = []
    for k in range(length + 1):
        if first_hit is not None and k >= first_hit:
            out.append(tau)
        else:
            out.append(0.1)
    out[-1] = final
    return out


def fixture_episodes():
    """Three episodes: final ER 0.5 / 0.9 / 0.94, CS@0.85 absent / 100 / 200, 0.95 never reached."""
    return [
        make_log(ramp(0.5), (1.0, 3.0), seed=1),
        make_log(ramp(0.9, first_hit=100), (2.0, 2.0), seed=2),
        make_log(ramp(0.94, first_hit=200), (0.0, 4.0), seed=3),
    ]
