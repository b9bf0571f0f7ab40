"""Write formulas_synthetic.txt: 200 formulas covering every AST node kind.

The generator is seeded so the corpus is reproducible; the file is committed
and the parser tests read it rather than calling this script.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent

LEAVES = [
    "A1", "$B$2", "C$3", "$D4", "AA10", "XFD1048576",
    "A1:B5", "$A$1:$C$9", "A:A", "B:D", "1:1", "3:7",
    "Sheet2!B7", "'My Sheet'!C3", "'Q1 2017'!A1:B4", "'It''s'!A2",
    "[1]Prices!A1", "'[Book.xlsx]Rates'!$B$2",
    "Rate", "Loan_Amount", "MPP", "Periods", "Sheet1!LocalName", "tax.rate",
    "[@EBIT]", "[@Tax]", "tblTax[EBIT]", "tblTax[#All]", "tblTax[[#Headers],[EBIT]:[Tax]]",
    "tblSales[[#This Row],[Unit Price]]", "[@[Net Income]]", "tblTax[#Totals]", "tblTax[]",
    "0", "12", "3.5", "1E3", "0.05", '"text"', '"say ""hi"""', '""',
    "TRUE", "FALSE", "#N/A", "#DIV/0!", "#REF!", "#VALUE!",
    "{1,2,3}", '{1,"a";TRUE,#N/A}', "{-1,2.5}",
]

FUNCS_1 = ["ABS", "SUM", "ROUND", "ISERROR", "NOT", "LEN", "INDIRECT", "ISNA", "UPPER", "MAX"]
FUNCS_2 = ["IFERROR", "MIN", "AVERAGE", "POWER", "LEFT", "SUMIF", "COUNTIF", "IFNA", "MOD", "CONCATENATE"]
FUNCS_N = ["VLOOKUP", "HLOOKUP", "INDEX", "MATCH", "OFFSET", "PMT", "IF", "CHOOSE", "SUMPRODUCT", "XLOOKUP"]
BINARY = ["+", "-", "*", "/", "^", "&", "=", "<>", "<", ">", "<=", ">="]


def expr(rng: random.Random, depth: int) -> str:
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(LEAVES)
    form = rng.randrange(9)
    if form == 0:
        return f"{expr(rng, depth - 1)}{rng.choice(BINARY)}{expr(rng, depth - 1)}"
    if form == 1:
        return f"{rng.choice('+-')}{expr(rng, depth - 1)}"
    if form == 2:
        return f"{rng.choice(['A1', '12', 'Rate', '(B2+1)'])}%"
    if form == 3:
        return f"({expr(rng, depth - 1)})"
    if form == 4:
        return f"{rng.choice(FUNCS_1)}({expr(rng, depth - 1)})"
    if form == 5:
        return f"{rng.choice(FUNCS_2)}({expr(rng, depth - 1)},{expr(rng, depth - 1)})"
    if form == 6:
        n = rng.randint(3, 5)
        return f"{rng.choice(FUNCS_N)}(" + ",".join(expr(rng, depth - 1) for _ in range(n)) + ")"
    if form == 7:
        return rng.choice(["A1:B2 B2:C3", "(A1,C3)", "A1:B2:C3", "(A1:A3,C1:C3)", "Sheet2!A1:B2 Sheet2!B1:B9"])
    return rng.choice(["IF(A1,,2)", "NOW()", "PI()", "_xlfn.XLOOKUP(A1,B:B,C:C)", "SUM( A1 , 2 )", "IF(A1>0,\"yes\",\"no\")"])


def corpus(n: int = 200, seed: int = 20170101) -> list:
    rng = random.Random(seed)
    seen = dict.fromkeys(["=" + leaf for leaf in LEAVES])
    while len(seen) < n:
        seen["=" + expr(rng, 4)] = None
    return list(seen)[:n]


def main(path: Path = HERE / "formulas_synthetic.txt") -> None:
    path.write_text("\n".join(corpus()) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else HERE / "formulas_synthetic.txt")
