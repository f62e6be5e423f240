#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "kgqa/error.h"
#include "kgqa/graph_model.h"
#include "support.h"

namespace kgqa {
namespace {

using P = PhraseTriplePattern;

PhraseTerm var(int id) { return PhraseTerm::variable(id); }
PhraseTerm ent(std::string label) { return PhraseTerm::entity(std::move(label)); }

std::vector<P> running_example() {
  return {{var(1), "flow", ent("Danish Straits")}, {var(1), "city on shore", ent("Kaliningrad")}};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(BuildPgp, RunningExampleIsAThreeNodeStar) {
  PGP pgp = build_pgp(running_example());
  EXPECT_EQ(pgp.nodes.size(), 3u);
  EXPECT_EQ(pgp.edges.size(), 2u);
  EXPECT_EQ(pgp.unknown_count(), 1u);
  EXPECT_EQ(pgp.entity_count(), 2u);
  ASSERT_NE(pgp.main_unknown(), nullptr);
  EXPECT_EQ(pgp.main_unknown()->var_id, 1);
  EXPECT_EQ(classify_shape(pgp), Shape::kStar);
}

TEST(BuildPgp, BooleanSingleTriple) {
  std::vector<P> ps = {{ent("Berlin"), "capital of", ent("Germany")}};
  PGP pgp = build_pgp(ps, true);
  EXPECT_EQ(pgp.nodes.size(), 2u);
  EXPECT_EQ(pgp.edges.size(), 1u);
  EXPECT_EQ(pgp.main_unknown(), nullptr);
  EXPECT_EQ(classify_shape(pgp), Shape::kStar);
}

TEST(BuildPgp, ChainWithIntermediateUnknown) {
  std::vector<P> ps = {{var(1), "r1", ent("A")}, {var(1), "r2", var(2)}, {var(2), "r3", ent("B")}};
  PGP pgp = build_pgp(ps);
  EXPECT_EQ(pgp.nodes.size(), 4u);
  EXPECT_EQ(pgp.edges.size(), 3u);
  EXPECT_EQ(classify_shape(pgp), Shape::kPath);
  EXPECT_EQ(pgp.main_unknown()->var_id, 1);
}

TEST(BuildPgp, LowestVarIdIsMain) {
  std::vector<P> ps = {{var(7), "r", var(3)}, {var(3), "s", ent("X")}};
  PGP pgp = build_pgp(ps);
  EXPECT_EQ(pgp.main_unknown()->var_id, 3);
  std::size_t mains = std::count_if(pgp.nodes.begin(), pgp.nodes.end(),
                                    [](const PGPNode& n) { return n.is_main; });
  EXPECT_EQ(mains, 1u);
}

TEST(BuildPgp, Errors) {
  EXPECT_EQ(code_of([] { build_pgp(std::vector<P>{}); }), ErrorCode::kEmptyInput);
  std::vector<P> disconnected = {{var(1), "r", ent("A")}, {var(2), "s", ent("B")}};
  EXPECT_EQ(code_of([&] { build_pgp(disconnected); }), ErrorCode::kDisconnectedGraph);
  std::vector<P> no_unknown = {{ent("A"), "r", ent("B")}};
  EXPECT_EQ(code_of([&] { build_pgp(no_unknown); }), ErrorCode::kNoUnknown);
  std::vector<P> same_var = {{var(1), "r", var(1)}};
  EXPECT_EQ(code_of([&] { build_pgp(same_var); }), ErrorCode::kInvalidArgument);
  std::vector<P> empty_relation = {{var(1), "", ent("A")}};
  EXPECT_EQ(code_of([&] { build_pgp(empty_relation); }), ErrorCode::kInvalidArgument);
}

TEST(ClassifyShape, Other) {
  // Two disjoint stars joined through a middle edge: neither star nor path.
  std::vector<P> ps = {{var(1), "a", ent("A")}, {var(1), "b", ent("B")}, {var(1), "m", var(2)},
                       {var(2), "c", ent("C")}, {var(2), "d", ent("D")}};
  EXPECT_EQ(classify_shape(build_pgp(ps)), Shape::kOther);
}

// Connected random pattern lists: each new triple touches an existing node.
std::vector<P> random_patterns(testing::Rng& rng) {
  std::vector<std::string> entities = {"A", "B", "C", "D", "E"};
  std::vector<P> out;
  std::vector<PhraseTerm> seen = {var(1)};
  int next_var = 2;
  int n = rng.between(1, 5);
  for (int i = 0; i < n; ++i) {
    PhraseTerm anchor = rng.pick(seen);
    PhraseTerm other;
    int roll = rng.between(0, 2);
    if (roll == 0 && anchor.is_variable()) {
      other = var(next_var++);
    } else if (roll == 1 && seen.size() > 1) {
      other = rng.pick(seen);
    } else {
      other = ent(rng.pick(entities));
    }
    if (anchor == other || (!anchor.is_variable() && !other.is_variable() && anchor.label == other.label)) {
      other = var(next_var++);
    }
    P p = rng.coin() ? P{anchor, rng.word(), other} : P{other, rng.word(), anchor};
    out.push_back(p);
    seen.push_back(other);
  }
  return out;
}

// Node count equals the number of distinct entity labels plus distinct
// var_ids; edges decompose back into the input patterns.
TEST(BuildPgpProperty, NodeMergingAndDecomposition) {
  testing::Rng rng(11);
  for (int round = 0; round < 300; ++round) {
    std::vector<P> ps = random_patterns(rng);
    std::set<std::string> labels;
    std::set<int> vars;
    for (const auto& p : ps) {
      for (const auto* t : {&p.subject, &p.object}) {
        if (t->is_variable()) {
          vars.insert(*t->var_id);
        } else {
          labels.insert(t->label);
        }
      }
    }
    PGP pgp = build_pgp(ps);
    ASSERT_EQ(pgp.nodes.size(), labels.size() + vars.size());
    ASSERT_EQ(pgp.edges.size(), ps.size());
    ASSERT_NE(pgp.main_unknown(), nullptr);
    ASSERT_EQ(pgp.main_unknown()->var_id, *vars.begin());

    auto back = pgp.to_patterns();
    ASSERT_EQ(back.size(), ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      EXPECT_EQ(back[i].relation_label, ps[i].relation_label);
      auto key = [](const PhraseTerm& t) {
        return t.is_variable() ? "?" + std::to_string(*t.var_id) : t.label;
      };
      std::multiset<std::string> in = {key(ps[i].subject), key(ps[i].object)};
      std::multiset<std::string> out = {key(back[i].subject), key(back[i].object)};
      EXPECT_EQ(in, out);
    }
  }
}

// Independent shape oracle from node degrees.
Shape degree_oracle(const PGP& pgp) {
  std::map<std::string, int> degree;
  for (const auto& e : pgp.edges) {
    ++degree[e.endpoint_a];
    ++degree[e.endpoint_b];
  }
  for (const auto& [id, d] : degree) {
    if (static_cast<std::size_t>(d) == pgp.edges.size()) return Shape::kStar;
  }
  int ones = 0, twos = 0;
  for (const auto& [id, d] : degree) {
    ones += d == 1;
    twos += d == 2;
  }
  bool chain = ones == 2 && ones + twos == static_cast<int>(degree.size()) &&
               pgp.nodes.size() == pgp.edges.size() + 1 && pgp.edges.size() >= 2;
  return chain ? Shape::kPath : Shape::kOther;
}

TEST(ClassifyShapeProperty, MatchesDegreeOracle) {
  testing::Rng rng(12);
  std::map<Shape, int> seen;
  for (int round = 0; round < 300; ++round) {
    PGP pgp = build_pgp(random_patterns(rng));
    Shape s = classify_shape(pgp);
    ASSERT_EQ(s, degree_oracle(pgp));
    ++seen[s];
  }
  EXPECT_GT(seen[Shape::kStar], 0);
  EXPECT_GT(seen[Shape::kPath], 0);
}

}  // namespace
}  // namespace kgqa
