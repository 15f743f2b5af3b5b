//! Named identities. Every suite entry resolves to one of these by prefix.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Identity {
    pub key: &'static str,
    pub suite: &'static str,
    pub statement: &'static str,
    /// label of the source equation, with a quoted phrase where one pins it down
    pub anchor: &'static str,
    pub params: &'static str,
}

const fn id(
    key: &'static str,
    suite: &'static str,
    statement: &'static str,
    anchor: &'static str,
    params: &'static str,
) -> Identity {
    Identity { key, suite, statement, anchor, params }
}

const Q500: &str = "500 random draws: y on an annulus, 1 <= ell <= N, indices below ell";
const APPC: &str = "x, y random on an annulus; every N, j, L of the config";
const SERRE: &str = "divided powers at eps = 0 or by circle average around eps = 0 (eps_schedule radii)";

pub static REGISTRY: &[Identity] = &[
    // qarith
    id("Phi6", "qarith", "Phi(y) symmetry under swapping the two argument sides", "Phi6", Q500),
    id("BBP333b", "qarith", "finite sum of Phi against Pochhammer ratios", "BBP333b", Q500),
    id("coro10", "qarith", "transformation of Phi under (alpha, beta, gamma) shifts", "coro10", Q500),
    id("Phi expansion", "qarith", "Phi as an explicit finite sum equals the product form", "Phi", Q500),
    id("Phi hypergeometric", "qarith", "Phi equals a terminating 2phi1", "phitohy.a", Q500),
    // weights
    id("curve point", "weights", "x^N + y^N = k(1 + x^N y^N) and the mu relations at sampled points", "weights", "random mu from mu_seed"),
    id("square3b corner", "weights", "the square of W weights vanishes outside the ell block", "square3b", "p, p', q on the curve, 1 <= ell < N"),
    id("square4a upper", "weights", "upper block factorization of the square", "square4a", "p, p', q on the curve, 1 <= ell < N"),
    id("square4b lower", "weights", "lower block factorization of the square", "square4b", "p, p', q on the curve, 1 <= ell < N"),
    id("square6a dual", "weights", "the two forms of U^(ell) agree", "square6a", "p, p', q on the curve, 1 <= ell < N"),
    id("U2j fused two", "weights", "U^(ell,j) at ell = 2 equals the closed form U^(2,j)", "U2j", "random t, every j of the config"),
    id("u22 from U2j", "weights", "U^(2,j) at j = 2 equals the six-vertex weight u(t)", "u2", "random t"),
    // yangbaxter
    id("ybeUU", "yangbaxter", "face Yang-Baxter equation for U^(2,2), U^(2,j), U^(2,j)", "ybeUU", "100 random (t_r, t_q) pairs"),
    id("YBEuUU", "yangbaxter", "[U(t_r) x U(t_q)] R = R [U(t_q) x U(t_r)] for the monodromy", "YBEuUU", "100 random (t_r, t_q) pairs"),
    // appendixC
    id("[A,A]", "appendixC", "A(x) A(y) = A(y) A(x)", "ABCD", APPC),
    id("[B,B]", "appendixC", "B(x) B(y) = B(y) B(x)", "ABCD", APPC),
    id("[C,C]", "appendixC", "C(x) C(y) = C(y) C(x)", "ABCD", APPC),
    id("[D,D]", "appendixC", "D(x) D(y) = D(y) D(x)", "ABCD", APPC),
    id("AB", "appendixC", "A(x) B(y) exchange", "AB", APPC),
    id("DB", "appendixC", "D(x) B(y) exchange", "DB", APPC),
    id("AB2", "appendixC", "B(x) A(y) exchange", "AB2", APPC),
    id("DB2", "appendixC", "D(y) B(x) exchange", "DB2", APPC),
    id("AB3", "appendixC", "symmetrized A B exchange", "AB3", APPC),
    id("AB4", "appendixC", "weighted A B exchange", "AB4", APPC),
    id("AC", "appendixC", "A C exchange, both orderings", "AC", APPC),
    id("DC", "appendixC", "D C exchange, both orderings", "DC", APPC),
    id("ADBC1", "appendixC", "[D(y), A(x)] against C B terms with factor 1 - omega, as printed", "ADBC1", APPC),
    id("ADBC1 with 1-1/w", "appendixC", "[D(y), A(x)] against C B terms with factor 1 - 1/omega", "ADBC1", APPC),
    id("ADBC2", "appendixC", "[D(x), A(y)] against B C terms", "ADBC2", APPC),
    id("ADBC3", "appendixC", "C B - omega B C against A D products", "ADBC3", APPC),
    id("ADBC4", "appendixC", "C B - omega B C, x and y exchanged", "ADBC4", APPC),
    id("CB symmetric", "appendixC", "x (C B - omega B C)(x,y) is symmetric under x <-> y", "ADBC3", APPC),
    id("AD symmetric", "appendixC", "[A(x), D(y)] is symmetric under x <-> y", "ADBC1", APPC),
    id("A_L B(y)", "appendixC", "leading coefficient A_L against B(y)", "lcoeff", APPC),
    id("B(y) D_L", "appendixC", "B(y) commutes with D_L", "lcoeff", APPC),
    id("A_L B(x) order", "appendixC", "A_L B(x) ordering relation", "lcoeff", APPC),
    id("A(x) B_L", "appendixC", "A(x) B_L exchange", "lcoeff", APPC),
    id("D(x) B_L", "appendixC", "D(x) B_L exchange", "lcoeff", APPC),
    id("D_L B(x) order", "appendixC", "D_L commutes with B(x)", "lcoeff", APPC),
    id("ABlm", "appendixC", "coefficientwise A B exchange", "ABlm", "all coefficient indices"),
    id("BDml", "appendixC", "coefficientwise B D exchange", "BDml", "all coefficient indices"),
    id("CA lm", "appendixC", "coefficientwise C A exchange", "AC", "all coefficient indices"),
    id("CD lm", "appendixC", "coefficientwise C D exchange", "DC", "all coefficient indices"),
    id("CBshift", "appendixC", "shifted C B coefficient relation", "CBshift", "all coefficient indices"),
    id("CB from ADBC3", "appendixC", "C B coefficients from the ADBC3 relation", "CBshift", "all coefficient indices"),
    id("A0D0Bm", "appendixC", "A_0 and D_0 against B_m", "A0D0Bm", "all coefficient indices"),
    id("AlB1", "appendixC", "A_l against B_1", "AlB1", "all coefficient indices"),
    id("DmB1", "appendixC", "D_m against B_1", "DmB1", "all coefficient indices"),
    id("ACD0", "appendixC", "A_0, D_0 against C_m", "ACD0", "all coefficient indices"),
    id("C0Bm", "appendixC", "C_0 B_m relation", "C0Bm", "all coefficient indices"),
    id("CBL", "appendixC", "C B_L relation", "CBL", "all coefficient indices"),
    id("CB0L", "appendixC", "C_0 B_L relation", "CB0L", "all coefficient indices"),
    id("C0B1", "appendixC", "C_0 B_1 relation", "C0B1", "all coefficient indices"),
    id("CL-1BL", "appendixC", "C_{L-1} B_L relation", "CL-1BL", "all coefficient indices"),
    id("closed form", "appendixC", "extracted A_0, D_0, A_L, D_L, B_1, B_L, C_0, C_{L-1} match their closed forms", "lcoeff", "interpolated monodromy"),
    id("ADprodB", "appendixC", "A and D acting on products of B", "ADprodB", "random x_0, x_1, ..."),
    id("ADprodC", "appendixC", "A and D acting on products of C", "ADprodC", "random x_0, x_1, ..."),
    id("TF", "appendixC", "T_i F_k T_i^{-1} = omega^{a_ik} F_k", "TFE", "closed-form generators"),
    id("TE", "appendixC", "T_i E_k T_i^{-1} = omega^{-a_ik} E_k", "TFE", "closed-form generators"),
    id("EF", "appendixC", "[E_i, F_k] = delta_ik (T_i - T_i^{-1}) / (q - 1/q)", "comTFE", "closed-form generators"),
    id("T1 T0", "appendixC", "T_1 T_0 = 1", "TFE", "closed-form generators"),
    id("explicit", "appendixC", "E_i, F_i as given products of B, C and T", "generators", "closed-form generators"),
    // serre
    id("eps stability", "serre", "divided powers change by less than the bound when the eps radius is halved", "BEn", SERRE),
    id("serre2", "serre", "E_i E_k^(3) - E_k E_i E_k^(2) + E_k^(2) E_i E_k - E_k^(3) E_i = 0", "serre2", SERRE),
    id("serremd1", "serre", "modified Serre relation, cubed left factor", "serremd1", SERRE),
    id("serremd2", "serre", "modified Serre relation, cubed right factor", "serremd2", SERRE),
    id("thetaij", "serre", "divided-power commutation at the cyclic orders", "thetaij", SERRE),
    id("thetaiji", "serre", "reversed divided-power commutation at the cyclic orders", "thetaiji", SERRE),
    id("mulo", "serre", "products of divided powers of one generator", "mulo", SERRE),
    id("CBCjk", "serre", "C B C with two divided-power orders", "CBCjk", SERRE),
    id("CBCj", "serre", "C B C with one divided-power order", "CBCj", SERRE),
    // loop
    id("loop serre", "loop", "[[[x, y], y], y] = 0 for the loop generators x^+_0, x^-_1 and their barred partners", "generators", SERRE),
    // degeneracy
    id("commABn", "degeneracy", "A(x), D(x) commute with the divided powers B^(n), C^(n) in sector Q", "commABn", "random x, every Q"),
    id("commABnn", "degeneracy", "products C^(n) B^(n) commute with A and D", "commABnn", "random x, every Q"),
    id("A_L - D_L", "degeneracy", "A_L = D_L on the zero-charge block", "ADomega", "every Q"),
    id("comm", "degeneracy", "tau_2 commutes with C_0^(nN+Q) B_1^(mN+Q) and partners on the zero-charge block", "comm", "random x, every Q"),
    id("degeneracy", "degeneracy", "cluster multiplicity equals 2^{m_E}; m_E < 0 clusters need hat T = 0 (\"found ${\\hat{\\cal T}}(y_q,x_q)=0$ for that case\")", "Bamp", "charge 0, every Q, 10 random curve points"),
    // spectrum
    id("cluster", "spectrum", "cluster basis is invariant under tau_2(t) at every reference t", "tau2", "three reference t, clustering tol 1e-8 * spectral radius"),
    id("completeness", "spectrum", "cluster multiplicities add up to the block dimension", "tau2", "charge 0, every Q"),
    id("sector ambiguous", "spectrum", "two clusters lie within ten clustering tolerances", "tau2", "charge 0, every Q"),
    id("TQ", "spectrum", "tau(t) F(omega t) = omega^{-Pa} (1-t)^L F(t) + omega^{Pb} (1-omega^{1-j} t)^L F(omega^2 t)", "tau2", "charge 0, every Q"),
    id("bethe", "spectrum", "Bethe equations for the roots of F (\"Then the Bethe Ansatz equations become\")", "bethe", "charge 0, every Q"),
    id("reconstruction", "spectrum", "eigenvalue polynomial rebuilt from F coefficientwise", "tau2", "charge 0, every Q"),
    id("tauljt", "spectrum", "tau_{ell,j} acting on cluster vectors equals the sum of zeta terms", "tauljt", "random t, 2 <= ell <= N"),
    id("vector1", "spectrum", "Omega-based Bethe vector is a tau_2 eigenvector", "vector1", "smallest admissible ell"),
    id("vector2", "spectrum", "Omega-bar-based Bethe vector is a tau_2 eigenvector", "vector2", "smallest admissible ell"),
    id("vector3", "spectrum", "hat Bethe vector is a tau_2 eigenvector", "vector3", "smallest admissible ell"),
    id("vector4", "spectrum", "tilde Bethe vector is a tau_2 eigenvector", "vector4", "smallest admissible ell"),
    // functional
    id("funljp", "functional", "fusion recursion tau_{2,j} tau_{ell,j} - ... = tau_{ell+1,j} (\"we rewrite the functional relation\")", "funljp", "charge 0, 2 <= ell <= N-1, random t"),
    id("tautau", "functional", "tau_2(omega^{ell-1} t) tau_ell(t) recursion in operator form", "tautau", "charge 0, random t"),
    id("tauY", "functional", "tau_l(omega t) tau_l(t) - tau_{l-1}(omega t) tau_{l+1}(t) = omega^{-(l-1)Q} prod z (\"By iteration, we obtain the T-functional relation\")", "tauY", "charge 0, random t"),
    // curve
    id("funtt", "curve", "T_q hat T_q' = A^L tau_ell(t_q) + hat A^L X^ell tau_{N-ell}(omega^ell t_q)", "funtt", "N^L <= 1000, 5 random curve-point draws"),
    id("Drinfeld purity", "curve", "P is a polynomial in t^N", "PGG", "charge 0, m_E >= 0 clusters"),
    id("Drinfeld degree", "curve", "deg P = m_E", "PGG", "charge 0, m_E >= 0 clusters"),
    id("fun3", "curve", "T(x_q,y_q) hat T(y_q, omega^ell x_q) in terms of F and P (\"its eigenvalues become\")", "fun3", "10 random curve points"),
    id("Pa - Pb", "curve", "Pa - Pb = (j-1)L + Q mod N", "Bamp", "every solved cluster"),
    id("hat T vanishes", "curve", "hat T = 0 on clusters with m_E < 0", "hatTyx2", "10 random curve points"),
    id("fun3 closed forms", "curve", "closed forms of T and hat T reproduce fun3 for the best lambda assignment", "calTxy", "10 random curve points"),
    id("shiftT1", "curve", "T shift relation in x", "shiftT1", "10 random curve points"),
    id("shifthT1", "curve", "hat T shift relation in x", "shifthT1", "10 random curve points"),
    id("shiftT2", "curve", "T shift relation in y", "shiftT2", "10 random curve points"),
    id("shifthT2", "curve", "hat T shift relation in y", "shifthT2", "10 random curve points"),
    id("hatTt", "curve", "hat T proportional to T", "hatTt", "10 random curve points"),
];

pub fn lookup(key: &str) -> Option<&'static Identity> {
    REGISTRY.iter().find(|i| i.key == key)
}

/// The identity a check name belongs to: the longest key equal to the name
/// or followed by a space.
pub fn key_for(name: &str) -> Option<&'static Identity> {
    REGISTRY
        .iter()
        .filter(|i| name == i.key || name.strip_prefix(i.key).is_some_and(|r| r.starts_with(' ')))
        .max_by_key(|i| i.key.len())
}

pub fn explain(key: &str) -> Option<String> {
    let i = lookup(key)?;
    Some(format!(
        "{}\n  suite:     {}\n  statement: {}\n  anchor:    {}\n  tested at: {}\n",
        i.key, i.suite, i.statement, i.anchor, i.params
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_unique() {
        let mut k: Vec<_> = REGISTRY.iter().map(|i| i.key).collect();
        k.sort();
        k.dedup();
        assert_eq!(k.len(), REGISTRY.len());
    }

    #[test]
    fn longest_prefix() {
        assert_eq!(key_for("ADBC1 with 1-1/w").unwrap().key, "ADBC1 with 1-1/w");
        assert_eq!(key_for("ADBC1").unwrap().key, "ADBC1");
        assert_eq!(key_for("AB2").unwrap().key, "AB2");
        assert_eq!(key_for("ABlm second").unwrap().key, "ABlm");
        assert_eq!(key_for("CBCjk j=1 k=2").unwrap().key, "CBCjk");
        assert_eq!(key_for("serremd2 CL-1,BL (B cubed)").unwrap().key, "serremd2");
        assert_eq!(key_for("A_L - D_L on zero charge").unwrap().key, "A_L - D_L");
        assert_eq!(key_for("comm C0 B1 n=0 m=1").unwrap().key, "comm");
        assert!(key_for("ABC").is_none());
    }

    #[test]
    fn explain_cites_anchor() {
        assert!(explain("tauY").unwrap().contains("By iteration, we obtain the T-functional relation"));
        assert!(explain("bethe").unwrap().contains("bethe"));
        assert!(explain("nope").is_none());
    }
}
