#include <gtest/gtest.h>

#include <unordered_set>

#include "cliffrb/clifford.hpp"
#include "cliffrb/dense.hpp"
#include "cliffrb/gates.hpp"

using namespace cliffrb;
using boost::multiprecision::cpp_int;

TEST(Clifford, GroupOrders) {
    EXPECT_EQ(group_order(1, false), 24);
    EXPECT_EQ(group_order(1, true), 6);
    EXPECT_EQ(group_order(2, false), 11520);
    EXPECT_EQ(group_order(2, true), 720);
    EXPECT_EQ(group_order(3, true), 1451520);
}

TEST(Clifford, EnumerationIsCompleteAndClosed) {
    for (std::size_t n = 1; n <= 2; ++n) {
        for (bool q : {false, true}) {
            auto g = enumerate_group(n, q);
            EXPECT_EQ(cpp_int(g.size()), group_order(n, q));
            EXPECT_TRUE(g.front().is_identity());
            std::unordered_set<std::uint64_t> keys;
            for (const auto& c : g) keys.insert(c.encode64(q));
            EXPECT_EQ(keys.size(), g.size());
            Rng rng(17);
            std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
            for (int i = 0; i < 1000; ++i) {
                auto c = clifford_compose(g[pick(rng)], g[pick(rng)]);
                EXPECT_TRUE(keys.count(c.encode64(q)));
            }
        }
    }
}

TEST(Clifford, EnumerationGuardsSize) {
    EXPECT_THROW(enumerate_group(3, false), ResourceLimitError);
    EXPECT_THROW(enumerate_group(4, true), ResourceLimitError);
}

TEST(Clifford, SamplesAreValidTableaux) {
    Rng rng(21);
    for (std::size_t n = 1; n <= 8; ++n) {
        for (int i = 0; i < 1000; ++i) ASSERT_TRUE(sample_uniform(n, rng).is_valid());
    }
}

TEST(Clifford, ChoiceCountsMultiplyToGroupOrder) {
    for (std::size_t n = 1; n <= 8; ++n) {
        cpp_int prod = 1;
        auto counts = sampling_choice_counts(n);
        ASSERT_EQ(counts.size(), n);
        for (std::size_t k = 1; k <= n; ++k) {
            cpp_int four = cpp_int(1) << (2 * (n - k + 1));
            EXPECT_EQ(counts[k - 1].first, 2 * (four - 1));
            EXPECT_EQ(counts[k - 1].second, 4 * (four / 4));
            prod *= counts[k - 1].first * counts[k - 1].second;
        }
        EXPECT_EQ(prod, group_order(n, false));
    }
}

TEST(Clifford, ApplyPreservesCommutation) {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        std::size_t n = 1 + i % 6;
        auto c = sample_uniform(n, rng);
        auto p = random_pauli(n, rng), q = random_pauli(n, rng);
        EXPECT_EQ(pauli_commutes(p, q), pauli_commutes(c.apply(p), c.apply(q)));
    }
}

TEST(Clifford, ComposeIsAGroupAction) {
    Rng rng(12);
    for (int i = 0; i < 300; ++i) {
        std::size_t n = 1 + i % 6;
        auto c = sample_uniform(n, rng), d = sample_uniform(n, rng);
        auto p = random_pauli(n, rng);
        p.set_phase(static_cast<unsigned>(rng() & 3));
        EXPECT_EQ(clifford_compose(c, d).apply(p), c.apply(d.apply(p)));
    }
}

TEST(Clifford, InverseComposesToIdentity) {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        auto c = sample_uniform(1 + i % 8, rng);
        EXPECT_TRUE(clifford_compose(clifford_inverse(c), c).is_identity());
        EXPECT_TRUE(clifford_compose(c, clifford_inverse(c)).is_identity());
    }
}

TEST(Clifford, OneTransitiveAction) {
    for (std::size_t n = 1; n <= 2; ++n) {
        auto g = enumerate_group(n, false);
        std::size_t count = std::size_t{1} << (2 * n);
        std::vector<std::vector<std::size_t>> hits(count, std::vector<std::size_t>(count, 0));
        for (const auto& c : g) {
            for (std::size_t i = 1; i < count; ++i) hits[i][pauli_index(c.apply(pauli_from_index(n, i)).unsigned_part())]++;
        }
        std::size_t expect = g.size() / (count - 1);
        for (std::size_t i = 1; i < count; ++i)
            for (std::size_t j = 1; j < count; ++j) EXPECT_EQ(hits[i][j], expect);
    }
}

// Random gate words: the composed tableau must match conjugation by the composed dense unitary.
TEST(Clifford, AgreesWithDenseConjugation) {
    Rng rng(31);
    const char* one_qubit[] = {"H", "S", "X90", "Y90", "T"};
    for (std::size_t n = 1; n <= 2; ++n) {
        for (int i = 0; i < 50; ++i) {
            GateSequence word;
            word.n_qubits = n;
            for (int k = 0; k < 20; ++k) {
                if (n == 2 && rng() % 3 == 0) {
                    std::size_t c = rng() % 2;
                    word.push(rng() % 2 ? "CX" : "MS", {c, 1 - c});
                } else {
                    word.push(one_qubit[rng() % 5], {rng() % n});
                }
            }
            auto t = sequence_tableau(word);
            Matrix u = sequence_unitary(word);
            EXPECT_EQ(tableau_from_unitary(u), t);
            for (std::size_t p = 0; p < (std::size_t{1} << (2 * n)); ++p) {
                auto pp = pauli_from_index(n, p);
                EXPECT_LT((u * pauli_matrix(pp) * u.adjoint() - pauli_matrix(t.apply(pp))).norm(), 1e-9);
            }
        }
    }
}

TEST(Clifford, FindMappingMapsPToQ) {
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        std::size_t n = 1 + i % 5;
        auto p = random_pauli(n, rng), q = random_pauli(n, rng);
        if (p.is_identity() || q.is_identity()) continue;
        GateSequence seq = find_mapping(p, q);
        seq.n_qubits = n;
        EXPECT_EQ(sequence_tableau(seq).apply(p).unsigned_part(), q.unsigned_part());
    }
}

TEST(Clifford, TextAndEncodingRoundTrip) {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        auto c = sample_uniform(1 + i % 3, rng);
        EXPECT_EQ(CliffordTableau::from_text(c.to_text()), c);
        EXPECT_EQ(CliffordTableau::decode64(c.n_qubits(), c.encode64(false)), c);
        EXPECT_EQ(CliffordTableau::decode64(c.n_qubits(), c.encode64(true)), c.unsigned_representative());
    }
}

TEST(Clifford, InvalidImagesRejected) {
    EXPECT_THROW(CliffordTableau::from_images({PauliOperator::from_string("X")}, {PauliOperator::from_string("X")}),
                 std::invalid_argument);
}

TEST(Clifford, PauliTableaux) {
    auto x = CliffordTableau::from_pauli(PauliOperator::from_string("XI"));
    EXPECT_TRUE(x.is_pauli());
    EXPECT_EQ(x.as_pauli().unsigned_part(), PauliOperator::from_string("XI"));
    EXPECT_EQ(x.apply(PauliOperator::from_string("ZI")), PauliOperator::from_string("-ZI"));
}
