"""Closed forms against Monte Carlo: the validation report and the
quantized-feedback comparison behind the practical experiments.

First cross-checks the analytic MSEs (prediction, zero-holding, codec steady
state) against seeded simulation, then reproduces the bits-versus-MSE
comparison of the three practical schemes: direct quantization of the
predicted state, a noise-blind AR(1) innovation codec, and the proposed
closed-loop codec.

Run:  python demos/theory_vs_simulation.py
Writes practical_mse.csv next to this script.
"""

from pathlib import Path

from csi_feedback import parse_config_text, run_codec_experiment, validate_theory, write_csv

REFERENCE = """
ar_coeffs = 0.5, 0.2, 0.1, 0.05
innovation_var = 1.0
obs_noise_var = 1.0
samples_per_trial = 150000
quantizer_bits = 2,4,6,8,10
trials = 3
seed = 42
"""

SLOW_CHANNEL = """
ar_coeffs = 0.99
innovation_var = 1.0
obs_noise_var = 1.0
samples_per_trial = 150000
quantizer_bits = 6
trials = 1
seed = 42
"""


def main() -> None:
    print("== validation on a slowly fading channel (AR(1), coefficient 0.99) ==")
    print(validate_theory(parse_config_text(SLOW_CHANNEL)).format())

    print("\n== validation on the reference AR(4) channel ==")
    print(validate_theory(parse_config_text(REFERENCE)).format())
    print(
        "note: the zero-holding closed form drops the hold/filter cross terms, so it\n"
        "overstates the realised MSE of the estimator on fast-varying channels; the\n"
        "prediction and steady-state checks pass."
    )

    print("\n== bits versus reconstruction MSE for the three practical schemes ==")
    config = parse_config_text(REFERENCE)
    rows = run_codec_experiment(config)
    widths = sorted({row.rate_bits for row in rows})
    by_scheme = {}
    for row in rows:
        by_scheme.setdefault(row.scheme, {})[row.rate_bits] = row.distortion
    header = "bits " + "".join(f"{s:>22s}" for s in by_scheme)
    print(header)
    for bits in widths:
        cells = "".join(f"{by_scheme[s][bits]:22.4f}" for s in by_scheme)
        print(f"{int(bits):4d} {cells}")

    out = Path(__file__).with_name("practical_mse.csv")
    write_csv(out, rows)
    print(f"\nwrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
