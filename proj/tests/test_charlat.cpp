// SPDX-License-Identifier: MIT
//
// Tests for characteristic vectors: pairing coordinates, weights, the
// finite class structure modulo 2L, minimal representatives, and the
// exact ellipsoid enumeration that underlies them.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "latcoh/charlat.hpp"

using namespace latcoh;

namespace {

std::string data_path(const std::string& name) {
    return std::string(LATCOH_DATA_DIR) + "/" + name;
}

// Random connected tree, decorations in [lo, hi].
PlumbingGraph random_tree(std::mt19937_64& rng, int s, int lo, int hi) {
    std::uniform_int_distribution<int> dec(lo, hi);
    std::vector<Int> e;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < s; ++i) {
        e.emplace_back(dec(rng));
        if (i > 0) {
            std::uniform_int_distribution<int> parent(0, i - 1);
            edges.emplace_back(parent(rng), i);
        }
    }
    return PlumbingGraph(e, edges);
}

// A random characteristic vector: e + 2 + 2*(random integer vector).
CharVec random_char(std::mt19937_64& rng, const PlumbingGraph& g, int spread) {
    std::uniform_int_distribution<int> d(-spread, spread);
    CharVec a = canonical_char(g);
    for (auto& v : a) v += 2 * d(rng);
    return a;
}

// Pairing coordinates of the lattice vector with E-coordinates x: A x.
CharVec lattice_pairing_coords(const IntMat& big_a, const std::vector<Int>& x) {
    CharVec out(big_a.rows(), 0);
    for (std::size_t i = 0; i < big_a.rows(); ++i)
        for (std::size_t j = 0; j < big_a.cols(); ++j) out[i] += big_a(i, j) * x[j];
    return out;
}

Rat w_of(const IntMat& big_a, const CharVec& a0, const std::vector<Int>& u) {
    Rat lin(0);
    for (std::size_t i = 0; i < u.size(); ++i) lin += Rat(a0[i] * u[i]);
    Rat quad(0);
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j) quad += Rat(u[i] * big_a(i, j) * u[j]);
    return (lin + quad) / 2;
}

}  // namespace

TEST_CASE("canonical characteristic vectors of the fixtures") {
    PlumbingGraph g = load_graph(data_path("e8_plus_vertex.graph"));
    CharVec k = canonical_char(g);
    REQUIRE(k.size() == 9);
    for (std::size_t j = 0; j < 8; ++j) CHECK(k[j] == 0);
    CHECK(k[g.index_of("j0")] == -1);
    CHECK(is_characteristic(g, k));
    // k equals -E*_{j0} in pairing coordinates, and k^2 = -1.
    CHECK(k_square(g.intersection_form(), k) == Rat(-1));

    PlumbingGraph e8 = load_graph(data_path("e8.graph"));
    CharVec k8 = canonical_char(e8);
    CHECK(std::all_of(k8.begin(), k8.end(), [](const Int& v) { return v == 0; }));
    CHECK(k_square(e8.intersection_form(), k8) == Rat(0));

    CHECK_FALSE(is_characteristic(g, CharVec(9, Int(1))));
    CHECK_FALSE(is_characteristic(g, CharVec(3, Int(0))));
}

TEST_CASE("chi equals the weight difference") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> size_d(1, 5), coord(-3, 3);
    for (int trial = 0; trial < 40; ++trial) {
        PlumbingGraph g = random_tree(rng, size_d(rng), -5, -2);
        IntMat m = g.intersection_form();
        IntMat big_a = -m;
        CharVec a = random_char(rng, g, 2);
        std::vector<Int> x(g.size());
        for (auto& v : x) v = coord(rng);
        // k + 2l in pairing coordinates is a + 2 A x.
        CharVec shifted(a);
        CharVec ax = lattice_pairing_coords(big_a, x);
        for (std::size_t j = 0; j < a.size(); ++j) shifted[j] += 2 * ax[j];
        CHECK(Rat(chi(m, a, x)) == weight_q(m, shifted) - weight_q(m, a));
    }
    // Non-characteristic input with an odd numerator is rejected.
    PlumbingGraph v({Int(-2)}, {});
    CHECK_THROWS_AS(chi(v.intersection_form(), {Int(1)}, {Int(1)}), std::domain_error);
}

TEST_CASE("restrict and extend are inverse on the inserted slot") {
    CharVec a{Int(3), Int(-1), Int(4)};
    for (std::size_t j0 = 0; j0 <= a.size(); ++j0) {
        CharVec big = extend_char(a, j0);
        REQUIRE(big.size() == 4);
        CHECK(big[j0] == 0);
        CHECK(restrict_char(big, j0) == a);
    }
    CHECK_THROWS_AS(restrict_char(a, 3), std::invalid_argument);
    CHECK_THROWS_AS(extend_char(a, 4), std::invalid_argument);
}

TEST_CASE("residue table classifies modulo the column span") {
    std::mt19937_64 rng(31415);
    std::uniform_int_distribution<int> size_d(1, 5), coord(-4, 4);
    for (int trial = 0; trial < 30; ++trial) {
        PlumbingGraph g = random_tree(rng, size_d(rng), -4, -1);
        if (g.degenerate()) continue;
        IntMat big_a = -g.intersection_form();
        ResidueTable table(big_a);
        CHECK(table.count() == abs(g.determinant()));
        // id is invariant under adding columns of A.
        std::vector<Int> x(g.size());
        for (auto& v : x) v = coord(rng);
        std::vector<Int> shift(g.size());
        for (auto& v : shift) v = coord(rng);
        std::vector<Int> y = x;
        for (std::size_t i = 0; i < y.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) y[i] += big_a(i, j) * shift[j];
        CHECK(table.id_of(x) == table.id_of(y));
        // Lift inverts residues.
        std::vector<Int> r = table.residues(x);
        CHECK(table.residues(table.lift(r)) == r);
        CHECK(table.id_of(table.lift(r)) == table.id_of(x));
        // Distinct ids for all classes, and digits round-trip.
        if (table.count() <= 24) {
            std::set<std::string> seen;
            for (Int id = 0; id < table.count(); ++id) {
                std::vector<Int> rep = table.lift(table.digits(id));
                CHECK(table.id_of(rep) == id);
            }
        }
    }
    PlumbingGraph degen({Int(0)}, {});
    CHECK_THROWS_AS(ResidueTable(-degen.intersection_form()), std::domain_error);
}

TEST_CASE("characteristic classes: counting, representatives, dual-lattice match") {
    std::mt19937_64 rng(2718281);
    std::uniform_int_distribution<int> size_d(1, 4), coord(-3, 3);
    for (int trial = 0; trial < 25; ++trial) {
        PlumbingGraph g = random_tree(rng, size_d(rng), -4, -2);
        CharClasses cls(g);
        CHECK(cls.count() == g.determinant());
        CharVec a = random_char(rng, g, 3);
        Int id = cls.class_of(a);
        CHECK(id >= 0);
        CHECK(id < cls.count());
        CHECK(cls.class_of(cls.representative(id)) == id);
        // A dual-lattice vector l and the characteristic vector K + 2l
        // land in matching classes.
        std::vector<Int> l(g.size());
        for (auto& v : l) v = coord(rng);
        CharVec k2l = cls.canonical();
        for (std::size_t j = 0; j < k2l.size(); ++j) k2l[j] += 2 * l[j];
        CHECK(cls.table().id_of(l) == cls.class_of(k2l));
    }
    // Unimodular graphs have a single class.
    PlumbingGraph e8 = load_graph(data_path("e8.graph"));
    CHECK(CharClasses(e8).count() == 1);
    PlumbingGraph fix = load_graph(data_path("e8_plus_vertex.graph"));
    CHECK(CharClasses(fix).count() == 1);
    // det = 2 for a single (-2)-vertex; rep list is {0} and {2} up to class.
    PlumbingGraph m2 = load_graph(data_path("one_minus2.graph"));
    CharClasses c2(m2);
    REQUIRE(c2.count() == 2);
    CHECK(c2.class_of(c2.representative(0)) == 0);
    CHECK(c2.class_of(c2.representative(1)) == 1);
    CHECK(c2.class_of({Int(0)}) != c2.class_of({Int(2)}));
}

TEST_CASE("sublevel enumeration matches a brute-force box search") {
    std::mt19937_64 rng(5550123);
    std::uniform_int_distribution<int> size_d(1, 3);
    for (int trial = 0; trial < 20; ++trial) {
        PlumbingGraph g = random_tree(rng, size_d(rng), -5, -2);
        IntMat big_a = -g.intersection_form();
        CharVec a0 = random_char(rng, g, 2);
        for (Rat cap : {Rat(0), Rat(3), Rat(-1), Rat(7, 2)}) {
            std::vector<std::vector<Int>> found;
            enumerate_sublevel(big_a, a0, cap, [&](const std::vector<Int>& u, const Rat& w) {
                CHECK(w == w_of(big_a, a0, u));
                CHECK(w <= cap);
                for (const Int& c : u) REQUIRE(abs(c) <= 8);  // box must cover
                found.push_back(u);
            });
            // No duplicates.
            std::set<std::vector<std::string>> uniq;
            for (auto& u : found) {
                std::vector<std::string> key;
                for (auto& c : u) key.push_back(c.get_str());
                CHECK(uniq.insert(key).second);
            }
            // Brute force over the box.
            std::size_t s = g.size();
            long count = 0;
            std::vector<Int> u(s);
            long side = 17, total = 1;
            for (std::size_t i = 0; i < s; ++i) total *= side;
            for (long code = 0; code < total; ++code) {
                long c = code;
                for (std::size_t i = 0; i < s; ++i) {
                    u[i] = (c % side) - 8;
                    c /= side;
                }
                if (w_of(big_a, a0, u) <= cap) ++count;
            }
            CHECK((long)found.size() == count);
        }
    }
    // The empty lattice has one point of weight zero.
    int hits = 0;
    enumerate_sublevel(IntMat(0, 0), {}, Rat(0), [&](const std::vector<Int>& u, const Rat& w) {
        CHECK(u.empty());
        CHECK(w == 0);
        ++hits;
    });
    CHECK(hits == 1);
    enumerate_sublevel(IntMat(0, 0), {}, Rat(-1),
                       [&](const std::vector<Int>&, const Rat&) { ++hits; });
    CHECK(hits == 1);
    // Indefinite input is rejected.
    PlumbingGraph p1({Int(1)}, {});
    CHECK_THROWS_AS(
        enumerate_sublevel(-p1.intersection_form(), {Int(0)}, Rat(0),
                           [](const std::vector<Int>&, const Rat&) {}),
        std::domain_error);
}

TEST_CASE("class_min finds the minimal representative") {
    std::mt19937_64 rng(90210);
    std::uniform_int_distribution<int> size_d(1, 3);
    for (int trial = 0; trial < 20; ++trial) {
        PlumbingGraph g = random_tree(rng, size_d(rng), -5, -2);
        IntMat m = g.intersection_form();
        IntMat big_a = -m;
        CharVec a = random_char(rng, g, 2);
        CharVec best = class_min(g, a);
        CHECK(is_characteristic(g, best));
        CHECK(CharClasses(g).class_of(best) == CharClasses(g).class_of(a));
        CHECK(weight_q(m, best) <= weight_q(m, a));
        CHECK(class_min(g, best) == best);

        // Brute force: scan u in [-6,6]^s for min W, tie-broken by the
        // lexicographically smallest shifted vector.
        std::size_t s = g.size();
        bool have = false;
        Rat bw(0);
        CharVec bvec;
        std::vector<Int> u(s);
        long side = 13, total = 1;
        for (std::size_t i = 0; i < s; ++i) total *= side;
        for (long code = 0; code < total; ++code) {
            long c = code;
            for (std::size_t i = 0; i < s; ++i) {
                u[i] = (c % side) - 6;
                c /= side;
            }
            Rat w = w_of(big_a, a, u);
            CharVec cand(a);
            for (std::size_t i = 0; i < s; ++i)
                for (std::size_t j = 0; j < s; ++j) cand[j] += 2 * big_a(j, i) * u[i];
            if (!have || w < bw || (w == bw && cand < bvec)) {
                have = true;
                bw = w;
                bvec = cand;
            }
        }
        CHECK(best == bvec);
    }
    PlumbingGraph p1({Int(1)}, {});
    CHECK_THROWS_AS(class_min(p1, {Int(1)}), std::domain_error);
}

TEST_CASE("d-invariants and grading shifts of the fixtures") {
    PlumbingGraph e8 = load_graph(data_path("e8.graph"));
    CHECK(d_invariant(e8, canonical_char(e8)) == Rat(-2));
    CHECK(canonical_shift(e8) == Rat(2));
    CHECK(normalized_weight(e8, canonical_char(e8)) == Rat(0));

    PlumbingGraph fix = load_graph(data_path("e8_plus_vertex.graph"));
    CHECK(d_invariant(fix, canonical_char(fix)) == Rat(-2));
    CHECK(canonical_shift(fix) == Rat(2));
    CHECK(normalized_weight(fix, canonical_char(fix)) == Rat(0));

    PlumbingGraph m2 = load_graph(data_path("one_minus2.graph"));
    CHECK(d_invariant(m2, {Int(0)}) == Rat(-1, 4));
    CHECK(d_invariant(m2, {Int(2)}) == Rat(1, 4));
    CHECK(class_min(m2, {Int(2)}) == CharVec{Int(-2)});
    CHECK(canonical_shift(m2) == Rat(1, 4));

    PlumbingGraph m1 = load_graph(data_path("one_minus1.graph"));
    CHECK(d_invariant(m1, canonical_char(m1)) == Rat(0));
    CHECK(canonical_shift(m1) == Rat(0));

    // Empty graph: single class, zero weight, zero shift.
    PlumbingGraph empty = m1.delete_vertex(0);
    CHECK(canonical_char(empty).empty());
    CHECK(CharClasses(empty).count() == 1);
    CHECK(class_min(empty, {}).empty());
    CHECK(d_invariant(empty, {}) == Rat(0));
    CHECK(canonical_shift(empty) == Rat(0));
}

TEST_CASE("weights against hand values") {
    // Single (-2): K = 0 has q = -1/8; the other class rep 2 has q = 1/8.
    PlumbingGraph m2 = load_graph(data_path("one_minus2.graph"));
    IntMat m = m2.intersection_form();
    CHECK(weight_q(m, {Int(0)}) == Rat(-1, 8));
    CHECK(weight_q(m, {Int(2)}) == Rat(1, 8));
    // E8 canonical: q = -1.
    PlumbingGraph e8 = load_graph(data_path("e8.graph"));
    CHECK(weight_q(e8.intersection_form(), canonical_char(e8)) == Rat(-1));
    // Nine-vertex fixture canonical: q = -1 as well.
    PlumbingGraph fix = load_graph(data_path("e8_plus_vertex.graph"));
    CHECK(weight_q(fix.intersection_form(), canonical_char(fix)) == Rat(-1));
}
