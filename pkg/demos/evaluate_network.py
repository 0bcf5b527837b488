"""Quantify the demo network, query it, and score it on labeled cases.

Run from the repository root after installing the package:

    python3 demos/evaluate_network.py
"""

from elicit import (
    EvaluationConfig,
    cases_to_jsonl,
    demo_cases,
    demo_network,
    evaluate,
    posterior,
    predict,
    report_to_text,
)


def banner(text):
    print()
    print(text)
    print("-" * len(text))


def show_posterior(network, evidence):
    post = posterior(network, "Stage", evidence)
    described = ", ".join(f"{k}={v}" for k, v in evidence.items()) or "nothing"
    print(f"  Given {described}:")
    states = network.schema.variable("Stage").states
    for state, value in zip(states, post.distribution):
        bar = "#" * round(value * 40)
        print(f"    {state:<4} {value:6.3f}  {bar}")


def main():
    network = demo_network()

    banner("1. Ask the quantified network questions")
    show_posterior(network, {})
    show_posterior(network, {"Shape": "scirrhous", "Length": "more than 10 cm"})
    show_posterior(network, {
        "Shape": "polypoid",
        "Length": "less than 5 cm",
        "EchoInvasion": "submucosa (T1)",
        "XrayChest": "no metastases",
    })

    banner("2. Predictions pick the highest posterior")
    evidence = {"EchoInvasion": "adventitia (T3)"}
    prediction = predict(network, "Stage", evidence)
    print(f"  Evidence {evidence} -> predicted stage {prediction.state}")

    banner("3. Score the network against labeled cases")
    cases = demo_cases(network)
    print(f"  {len(cases)} cases; first record on disk looks like:")
    print(f"    {cases_to_jsonl(cases[:1]).strip()}")
    print()
    config = EvaluationConfig("Stage", near_tie_delta=0.05)
    report = evaluate(network, cases, config)
    for line in report_to_text(report, config).splitlines():
        print(f"  {line}")

    banner("4. The near-tie margin widens the notion of 'correct'")
    for delta in (0.0, 0.05, 0.10):
        r = evaluate(network, cases, EvaluationConfig("Stage", delta))
        print(f"  delta={delta:<5} strict {r.strict_correct:>3}   "
              f"near-tie {r.near_tie_correct:>3}")
    print("\n  delta=0 collapses near-tie scoring back to strict scoring.")


if __name__ == "__main__":
    main()
