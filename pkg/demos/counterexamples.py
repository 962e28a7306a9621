"""The two small counterexamples, computed and printed.

Run with:  python3 demos/counterexamples.py

contact_p3: on A(3;1) at p = 3 the operator nabla = D_K(X_1)^2 d_3 is not a
derivation; its Leibniz defect on (X_2, X_3^(2)) is printed along with whether
the conjugated element E lies in K(3;1)^(1).

rumynin: the 3-dimensional simple algebra at p = 2.  The script prints its
p-envelope dimension and whether (1 + ad f) ad e (1 + ad f) lies in ad(L).
"""

from cartanlab.criterion import contact_p3_analysis, rumynin_analysis
from cartanlab.liecore import build_rumynin, is_simple, p_envelope


def contact():
    r = contact_p3_analysis()
    print("contact_p3")
    print("  dim K(3;1)^(1) at p=3:     %d" % r["dim_L"])
    print("  Leibniz defect:            %s" % r["defect"])
    print("  defect equals -X_1:        %s" % r["defect_equals_minus_x1"])
    print("  E has the expected form:   %s" % r["E_matches_stated_form"])
    print("  E in L:                    %s" % r["E_in_L"])
    print("  nabla in L:                %s" % r["nabla_in_L"])


def rumynin():
    R = build_rumynin()
    r = rumynin_analysis()
    print("rumynin")
    print("  simplicity:                %s" % is_simple(R).status)
    print("  p-envelope dim:            %d" % p_envelope(R).dim)
    print("  conjugate in ad(L):        %s" % r["membership"])
    print("  residue is zero:           %s" % (not r["residue"].any()))
    print("  ad(f)ad(h) in ad(L):       %s" % r["adf_adh_in_adL"])


if __name__ == "__main__":
    contact()
    rumynin()
