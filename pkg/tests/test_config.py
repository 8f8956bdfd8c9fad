import math

import pytest

from xgate.analytic import GateFamily
from xgate.config import ConfigError, load_config, parse_ratios

PARAMS = """
[params]
B = 1000
dB = -100
J0 = 20
J1 = 20
omega = 200
"""


def test_parse_ratios():
    r = parse_ratios("0:0.2:0.01")
    assert len(r) == 21 and r[0] == 0.0 and r[-1] == 0.2 and r[9] == 0.09
    assert parse_ratios("0, 0.05,0.1") == (0.0, 0.05, 0.1)
    for bad in ("0:0.2:0", "0.2:0:0.1", "a,b", "-0.1", ""):
        with pytest.raises(ConfigError):
            parse_ratios(bad)


def test_trace_families_and_defaults():
    cfg = load_config(PARAMS + "[trace]\nfamilies = cz_nres_plus, iswap_plus ; two curves\n", "fidelity-trace")
    assert [g.family for g in cfg.gates] == [GateFamily.CZ_NRES_PLUS, GateFamily.ISWAP_PLUS]
    assert cfg.trace.points == 2000 and cfg.trace.t_end == 1.2
    assert cfg.params.J1 == 20.0


def test_gate_sections_override_params_and_solve_tau():
    text = PARAMS + """
[gate:czm]
family = cz_res_minus
J1 = 16
n = 5
m = 2
[gate:const]
family = cz_const
J1 = 0
[noise]
ratios = 0, 0.1
"""
    cfg = load_config(text, "noise-sweep", quad_order=11)
    czm, const = cfg.gates
    assert czm.params.J1 == 16 and czm.tau == pytest.approx(math.pi / 4)
    assert const.tau == pytest.approx(math.pi / 20)
    assert cfg.noise.quad_order == 11 and cfg.noise.ratios == (0.0, 0.1)


@pytest.mark.parametrize("text, task", [
    ("[trace]\nt_end = 1\n", "fidelity-trace"),                      # no params
    (PARAMS.replace("J1 = 20", "J1 = 30"), "solve-gates"),            # |J1| > J0
    (PARAMS.replace("omega = 200", "omega = fast"), "solve-gates"),   # not a number
    (PARAMS + "[trace]\nt_end = -1\nfamilies = cz_res_plus\n", "fidelity-trace"),
    (PARAMS + "[trace]\nfamilies = cnot\n", "fidelity-trace"),
    (PARAMS, "fidelity-trace"),                                       # no curves
    (PARAMS + "[solve]\nfamilies = cz, swap\n", "solve-gates"),
    (PARAMS + "[noise]\nratios = 0:0.1:0.05\nquad_order = 40\n[gate:c]\nfamily=cz_const\nJ1=0\n", "noise-sweep"),
    (PARAMS + "[noise]\nratios = 0:0.1:0.05\n", "noise-sweep"),       # no gates
    (PARAMS + "[gate:x]\nfamily = cz_res_plus\nn = 5\nm = 2\nJ1 = 16\n", "fidelity-trace"),  # parity mismatch
    (PARAMS + "[gate:x]\nfamily = cz_res_plus\n", "fidelity-trace"),  # auto tau without n, m
    (PARAMS + "[gate:x]\nfamily = cz_const\n", "fidelity-trace"),     # const with J1 != 0
    ("[params\nB=1", "evolve"),                                       # malformed
    (PARAMS, "plot"),
])
def test_invalid_configs(text, task):
    with pytest.raises(ConfigError):
        load_config(text, task)


def test_rejects_nonpositive_steps():
    with pytest.raises(ConfigError):
        load_config(PARAMS, "solve-gates", steps=0)
