#include "qqkit/liedata.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "qqkit_algebras_embedded.hpp"

namespace qqkit::lie {

bool AlgebraData::simply_laced() const {
    return std::all_of(sym.begin(), sym.end(), [](int d) { return d == 1; });
}

int AlgebraData::lacing() const {
    return *std::max_element(sym.begin(), sym.end());
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void validate(const AlgebraData& a) {
    const int n = a.rank;
    if (n <= 0 || int(a.cartan.size()) != n) fail(a.name() + ": bad Cartan size");
    for (int i = 0; i < n; ++i) {
        if (int(a.cartan[i].size()) != n) fail(a.name() + ": ragged Cartan row");
        if (a.cartan[i][i] != 2) fail(a.name() + ": C_ii != 2");
        for (int j = 0; j < n; ++j)
            if (i != j && a.cartan[i][j] > 0) fail(a.name() + ": C_ij > 0 off-diagonal");
    }
    // B = DC symmetric, d positive and relatively prime
    int g = 0;
    for (int i = 0; i < n; ++i) {
        if (a.sym[i] <= 0) fail(a.name() + ": nonpositive symmetrizer");
        g = std::gcd(g, a.sym[i]);
    }
    if (g != 1) fail(a.name() + ": symmetrizers not relatively prime");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (a.bmatrix[i][j] != a.sym[i] * a.cartan[i][j]) fail(a.name() + ": B != DC");
            if (a.bmatrix[i][j] != a.bmatrix[j][i]) fail(a.name() + ": B not symmetric");
        }
    if (int(a.exponents.size()) != n) fail(a.name() + ": exponent count != rank");
    if (int(a.kac_labels.size()) != n + 1) fail(a.name() + ": need a_0..a_n labels");
    if (a.kac_labels[0] != 1) fail(a.name() + ": a_0 != 1");
    // h = 1 + sum a_i, h^vee = 1 + sum a_i d_i / lacing
    int h = 1, twice_hv_num = 0;
    const int lac = a.lacing();
    for (int i = 1; i <= n; ++i) {
        h += a.kac_labels[i];
        twice_hv_num += a.kac_labels[i] * a.sym[i - 1];
    }
    if (h != a.coxeter) fail(a.name() + ": Coxeter number inconsistent with labels");
    if (twice_hv_num % lac != 0 || 1 + twice_hv_num / lac != a.dual_coxeter)
        fail(a.name() + ": dual Coxeter inconsistent with labels");
}

std::vector<AlgebraData> parse(const std::string& text) {
    std::vector<AlgebraData> out;
    std::istringstream in(text);
    std::string line;
    AlgebraData cur;
    bool open = false;
    int cartan_rows_left = 0;
    int lineno = 0;
    auto ints = [](std::istringstream& ss) {
        std::vector<int> v;
        int x;
        while (ss >> x) v.push_back(x);
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (cartan_rows_left > 0) {
            std::istringstream row(line);
            cur.cartan.push_back(ints(row));
            --cartan_rows_left;
            continue;
        }
        if (key == "algebra") {
            if (open) fail("algebra table: record not closed before line " + std::to_string(lineno));
            cur = AlgebraData{};
            std::string t;
            if (!(ss >> t >> cur.rank) || t.size() != 1)
                fail("algebra table: bad header at line " + std::to_string(lineno));
            cur.type_tag = t[0];
            open = true;
        } else if (key == "cartan") {
            cartan_rows_left = cur.rank;
        } else if (key == "sym") {
            cur.sym = ints(ss);
        } else if (key == "exponents") {
            cur.exponents = ints(ss);
        } else if (key == "coxeter") {
            ss >> cur.coxeter;
        } else if (key == "dualcoxeter") {
            ss >> cur.dual_coxeter;
        } else if (key == "labels") {
            cur.kac_labels = ints(ss);
        } else if (key == "end") {
            cur.bmatrix.assign(cur.rank, std::vector<int>(cur.rank, 0));
            for (int i = 0; i < cur.rank; ++i)
                for (int j = 0; j < cur.rank; ++j)
                    cur.bmatrix[i][j] = cur.sym.at(i) * cur.cartan.at(i).at(j);
            validate(cur);
            out.push_back(std::move(cur));
            open = false;
        } else {
            fail("algebra table: unknown key '" + key + "' at line " + std::to_string(lineno));
        }
    }
    if (open) fail("algebra table: truncated record");
    return out;
}

const std::vector<AlgebraData>& table() {
    static std::vector<AlgebraData> entries = [] {
        if (const char* path = std::getenv("QQKIT_ALGEBRA_TABLE")) {
            std::ifstream f(path);
            if (!f) fail(std::string("cannot open QQKIT_ALGEBRA_TABLE=") + path);
            std::stringstream ss;
            ss << f.rdbuf();
            return parse(ss.str());
        }
        return parse(detail::kEmbeddedAlgebraTable);
    }();
    return entries;
}

} // namespace

std::vector<AlgebraData> parse_algebra_table(const std::string& text) { return parse(text); }

const AlgebraData& load_algebra(char type_tag, int rank) {
    for (const auto& a : table())
        if (a.type_tag == type_tag && a.rank == rank) return a;
    fail("unknown or unsupported algebra " + std::string(1, type_tag) + std::to_string(rank) +
         " (supported: A1..A8, B2..B4, C2..C4, D4, D5, E6, E7, E8, F4, G2)");
}

const AlgebraData& load_algebra(const std::string& name) {
    if (name.size() < 2) fail("bad algebra name '" + name + "'");
    return load_algebra(name[0], std::atoi(name.c_str() + 1));
}

std::vector<std::string> supported_algebras() {
    std::vector<std::string> names;
    for (const auto& a : table()) names.push_back(a.name());
    return names;
}

std::vector<int> solve_symmetrizers(const std::vector<std::vector<int>>& C) {
    const int n = int(C.size());
    // Propagate d_i C_ij = d_j C_ji along edges of the diagram; the diagram
    // of a finite type is connected, so one sweep from node 0 reaches all.
    std::vector<Rational> d(n, Rational(0));
    d[0] = Rational(1);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (i == j || C[i][j] == 0) continue;
            Rational dj = d[i] * Rational(C[i][j]) / Rational(C[j][i]);
            if (d[j].is_zero()) {
                d[j] = dj;
                stack.push_back(j);
            } else if (d[j] != dj) {
                throw std::invalid_argument("solve_symmetrizers: DC cannot be symmetric");
            }
        }
    }
    std::int64_t lcm_den = 1;
    for (const auto& r : d) {
        if (r.is_zero()) throw std::invalid_argument("solve_symmetrizers: diagram not connected");
        lcm_den = std::lcm(lcm_den, r.den());
    }
    std::vector<int> out(n);
    std::int64_t g = 0;
    for (int i = 0; i < n; ++i) {
        Rational v = d[i] * Rational(lcm_den);
        out[i] = int(v.num());
        g = std::gcd(g, v.num());
    }
    for (auto& x : out) x = int(x / g);
    return out;
}

TwistedFoldData fold_twisted(const AlgebraData& g, const std::vector<int>& sigma) {
    const int n = g.rank;
    if (!g.simply_laced() || (g.type_tag != 'A' && g.type_tag != 'D' && g.type_tag != 'E'))
        fail("fold_twisted: base must be of type A, D or E6");
    if (g.type_tag == 'E' && g.rank != 6) fail("fold_twisted: only E6 admits a fold");
    if (int(sigma.size()) != n) fail("fold_twisted: sigma has wrong size");

    // permutation check
    std::vector<bool> seen(n, false);
    for (int i = 0; i < n; ++i) {
        if (sigma[i] < 0 || sigma[i] >= n || seen[sigma[i]]) fail("fold_twisted: sigma not a permutation");
        seen[sigma[i]] = true;
    }
    // diagram automorphism: C_{s(i),s(j)} = C_{i,j}
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.cartan[sigma[i]][sigma[j]] != g.cartan[i][j])
                fail("fold_twisted: sigma is not a diagram automorphism");
    // order
    int r = 1;
    {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (; r <= 3; ++r) {
            for (int i = 0; i < n; ++i) p[i] = sigma[p[i]];
            bool ident = true;
            for (int i = 0; i < n; ++i) ident &= (p[i] == i);
            if (ident) break;
        }
        if (r < 2 || r > 3) fail("fold_twisted: sigma must have order 2 or 3");
    }

    TwistedFoldData out;
    out.base_type = g.type_tag;
    out.base_rank = n;
    out.twist_order = r;

    std::vector<int> orbit_of(n, -1);
    for (int i = 0; i < n; ++i) {
        if (orbit_of[i] >= 0) continue;
        std::vector<int> orb;
        int j = i;
        do {
            orbit_of[j] = int(out.orbits.size());
            orb.push_back(j);
            j = sigma[j];
        } while (j != i);
        std::sort(orb.begin(), orb.end());
        out.orbits.push_back(orb);
    }
    const int m = out.orbit_count();

    // Choose representatives so that whenever orbits interact, the chosen
    // pair satisfies C_{i,j} = -1. Small search over all combinations.
    std::vector<int> choice(m, 0);
    auto reps_ok = [&](const std::vector<int>& reps) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                if (a == b) continue;
                int i = reps[a];
                bool interacts = false;
                for (int jn : out.orbits[b]) interacts |= (g.cartan[i][jn] != 0);
                if (interacts && g.cartan[i][reps[b]] != -1) return false;
            }
        return true;
    };
    bool found = false;
    std::vector<int> reps(m);
    while (true) {
        for (int a = 0; a < m; ++a) reps[a] = out.orbits[a][choice[a]];
        if (reps_ok(reps)) { found = true; break; }
        int a = 0;
        while (a < m && ++choice[a] == int(out.orbits[a].size())) choice[a++] = 0;
        if (a == m) break;
    }
    if (!found) fail("fold_twisted: no admissible representative choice");
    out.representative = reps;

    out.cartan_reps.assign(m, std::vector<int>(m, 0));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            out.cartan_reps[a][b] = g.cartan[reps[a]][reps[b]];

    for (int a = 0; a < m; ++a) {
        int i = reps[a];
        int c = g.cartan[i][sigma[i]];
        if (c == 2) out.d.push_back(Rational(r));
        else if (c == 0) out.d.push_back(Rational(1));
        else if (c == -1) out.d.push_back(Rational(1, 2));
        else fail("fold_twisted: unexpected C_{i,sigma(i)}");
    }
    return out;
}

Rational dual_alpha(const Rational& alpha, int r_check) {
    if (alpha == Rational(-1)) fail("dual_alpha: alpha = -1 is excluded");
    return Rational(1) / (Rational(r_check) * (alpha + Rational(1))) - Rational(1);
}

} // namespace qqkit::lie
