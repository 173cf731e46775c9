"""From integer sentences to polynomial sentences, and back with witnesses.

A positive-existential sentence about integers is compiled into one about
F_p[t]: every integer variable becomes a pair of polynomial variables
constrained to the Pell solution family, and every arithmetic symbol is
replaced by its defining formula on pairs.  An integer witness then maps
to a polynomial witness, checked clause by clause.  The compiled text is
the same for every characteristic.
"""

from zinterp.formula import LANG_STAR, parse, print_formula
from zinterp.harness import e2e_verify
from zinterp.interp import pell_interpretation, translate

sentence = "(exists (n) (and (| 1 n) (!= n 0)))"
print("integer sentence:", sentence)

out = translate(pell_interpretation(), parse(sentence, LANG_STAR))
text = print_formula(out)
print()
print("compiled polynomial sentence:")
print(" ", text[:110], "...")
print(f"  ({len(text)} characters,"
      f" same bytes over any characteristic)")

print()
for p in (17, 19):
    report = e2e_verify(sentence, {"n": 3}, p)
    assert report.formula_text == text
    verdict = "verified" if report.ok else "falsified"
    print(f"over F_{p} with witness n=3: {verdict}")
    for clause in report.clauses:
        values = ",".join(str(m) for m in clause.values)
        print(f"  clause {clause.kind}({values}): {'ok' if clause.ok else 'FAIL'}")

print()
report = e2e_verify(sentence, {"n": 0}, 17)
print("witness n=0 instead:", "verified" if report.ok else "falsified",
      "(the inequation clause has no certificate)")
