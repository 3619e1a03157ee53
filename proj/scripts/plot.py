"""Plots for the CSV bundles written by the dualfuel CLI.

    python scripts/plot.py fan results/timeseries.csv --series shed_mw linepack_gwh
    python scripts/plot.py grid sweep/grid.csv --value mean_cost
    python scripts/plot.py curves compare/curves.csv
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def fan(args):
    df = pd.read_csv(args.csv)
    hours = df["time_min"] / 60.0
    fig, axes = plt.subplots(len(args.series), 1, figsize=(7, 2.6 * len(args.series)), sharex=True, squeeze=False)
    for ax, name in zip(axes[:, 0], args.series):
        for band, alpha in (("p998", 0.15), ("p98", 0.3), ("p90", 0.5)):
            ax.fill_between(hours, df[f"{name}_{band}_lo"], df[f"{name}_{band}_hi"], color="tab:blue", alpha=alpha,
                            lw=0, label=band)
        ax.plot(hours, df[f"{name}_mean"], color="k", lw=1, label="mean")
        ax.set_ylabel(name)
    axes[0, 0].legend(loc="best", fontsize="small")
    axes[-1, 0].set_xlabel("hours")
    fig.tight_layout()
    fig.savefig(args.output)


def grid(args):
    df = pd.read_csv(args.csv)
    table = df.pivot(index="K", columns="R", values=args.value)
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(table.values, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(table.columns)), [f"{r:g}" for r in table.columns])
    ax.set_yticks(range(len(table.index)), table.index)
    ax.set_xlabel("R (MW)")
    ax.set_ylabel("K")
    fig.colorbar(im, label=args.value)
    fig.tight_layout()
    fig.savefig(args.output)


def curves(args):
    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for strategy, part in df.groupby("strategy", sort=False):
        ax.step(part["fraction"] * 100.0, part["ens_gwh"], where="post", label=strategy)
    ax.set_xlabel("percentile of runs")
    ax.set_ylabel("energy not served (GWh)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="kind", required=True)
    p = sub.add_parser("fan")
    p.add_argument("csv")
    p.add_argument("--series", nargs="+", default=["shed_mw", "linepack_gwh"])
    p.set_defaults(run=fan, output="fan.png")
    p = sub.add_parser("grid")
    p.add_argument("csv")
    p.add_argument("--value", default="mean_cost")
    p.set_defaults(run=grid, output="grid.png")
    p = sub.add_parser("curves")
    p.add_argument("csv")
    p.set_defaults(run=curves, output="curves.png")
    for p in sub.choices.values():
        p.add_argument("-o", "--output", default=p.get_default("output"))
    args = parser.parse_args()
    args.run(args)


if __name__ == "__main__":
    main()
