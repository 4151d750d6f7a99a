#include <gtest/gtest.h>

#include <chrono>

#include "letlat/benchgen.hpp"
#include "letlat/io.hpp"
#include "letlat/jld_search.hpp"
#include "letlat/sim_oracle.hpp"
#include "support.hpp"

using namespace letlat;

namespace {

Search_options with_expansions(Objective o, std::size_t n)
{
	Search_options opt;
	opt.objective = o;
	opt.budget = {std::nullopt, n};
	return opt;
}

// re-derives everything the result claims from its dependency set
void expect_consistent(const TaskSet& ts, const Search_result& r)
{
	Schedule s = schedule_edf(ts, r.best.jlds); // throws if infeasible
	Interval_assignment a = schedule_aware(s);
	EXPECT_EQ(a, r.best.intervals);
	EXPECT_EQ(latencies_of(ts, a), r.best.latencies);
	auto let = latencies_of(ts, classic_let(ts));
	for (std::size_t c = 0; c < let.size(); ++c) {
		EXPECT_LE(r.best.latencies[c].alpha, let[c].alpha);
		EXPECT_LE(r.best.latencies[c].delta, let[c].delta);
	}
	EXPECT_GE(r.best.eval.improvement, 0.0);
	for (const Jld& d : r.added)
		EXPECT_TRUE(r.best.jlds.contains(d));
}

} // namespace

TEST(Evaluate, CountsImprovedChains)
{
	std::vector<Latency_pair> root{{11, 8}};
	EXPECT_EQ(evaluate(root, root, Objective::age).score, 0);
	EXPECT_EQ(evaluate(root, {{9, 9}}, Objective::age).score, 1);
	EXPECT_EQ(evaluate(root, {{9, 9}}, Objective::reaction).score, 0);
	EXPECT_EQ(evaluate(root, {{9, 9}}, Objective::both).score, 0);
	EXPECT_EQ(evaluate(root, {{10, 8}}, Objective::both).score, 1);
	EXPECT_EQ(evaluate(root, {{12, 9}}, Objective::age).score, 0);
	EXPECT_NEAR(evaluate(root, {{9, 9}}, Objective::age).improvement, 2.0 / 11.0, 1e-12);
	EXPECT_LT(evaluate(root, {{12, 9}}, Objective::both).improvement, 0.0);
}

TEST(Evaluate, ExampleDependenciesImproveAge)
{
	TaskSet ts = test::running_example();
	auto root = latencies_of(ts, schedule_aware(schedule_edf(ts)));
	auto node = latencies_of(ts, schedule_aware(schedule_edf(ts, test::running_example_jlds())));
	EXPECT_EQ(evaluate(root, node, Objective::age).score, 1);
}

TEST(HeuristicKey, PrefersLaterBeginThenEarlierEnd)
{
	// target interval [1,2] vs [0,3] from a parent at [0,3]
	Heuristic_key a{1, 1, 10, 1}, b{0, 0, 10, 1};
	EXPECT_TRUE(preferred(a, b));
	EXPECT_FALSE(preferred(b, a));
	Heuristic_key c{0, 1, 10, 1};
	EXPECT_TRUE(preferred(c, b));
	EXPECT_TRUE(preferred(a, c));
	// a child shrinking only other tasks ranks after one improving the target
	Heuristic_key other{0, 0, 5, 1};
	EXPECT_TRUE(preferred(c, other));
	EXPECT_FALSE(preferred(a, a));
}

TEST(HeuristicOrder, TiesFallBackToCanonicalDependencyOrder)
{
	Search_node x, y;
	x.jlds = Jld_set{Jld{{2, 0}, {1, 0}}};
	y.jlds = Jld_set{Jld{{1, 0}, {3, 0}}};
	std::vector<Search_node> v{x, y};
	heuristic_order(v);
	EXPECT_EQ(v[0].jlds, y.jlds);
}

TEST(Candidates, RunningExampleRoot)
{
	TaskSet ts = test::running_example();
	Schedule s = schedule_edf(ts);
	auto cands = candidate_jlds(ts, s, {}, Job_id{1, 0});
	EXPECT_NE(std::find(cands.begin(), cands.end(), Jld{{2, 0}, {1, 0}}), cands.end());
	for (const Jld& d : cands) {
		EXPECT_TRUE(d.predecessor == (Job_id{1, 0}) || d.successor == (Job_id{1, 0}));
		// already satisfied by the schedule: tau1,0 runs before tau3,0
		EXPECT_FALSE(d == (Jld{{1, 0}, {3, 0}}));
	}
	// existing dependencies and their reversals are not offered again
	Jld_set have{Jld{{2, 0}, {1, 0}}};
	auto again = candidate_jlds(ts, schedule_edf(ts, have), have, Job_id{1, 0});
	EXPECT_EQ(std::find(again.begin(), again.end(), Jld{{2, 0}, {1, 0}}), again.end());
	EXPECT_EQ(std::find(again.begin(), again.end(), Jld{{1, 0}, {2, 0}}), again.end());
}

TEST(Candidates, CyclicChildIsDiscarded)
{
	TaskSet ts = test::running_example();
	Search_node root;
	root.jlds = Jld_set{Jld{{2, 0}, {1, 0}}};
	root.intervals = schedule_aware(schedule_edf(ts, root.jlds));
	root.latencies = latencies_of(ts, root.intervals);
	Search_context ctx(ts, Objective::age, root.latencies);
	EXPECT_FALSE(make_child(ctx, root, {Jld{{1, 0}, {2, 0}}}, 1).has_value());
	// duplicate of what the node already has
	EXPECT_FALSE(make_child(ctx, root, {Jld{{2, 0}, {1, 0}}}, 1).has_value());
	auto child = make_child(ctx, root, {Jld{{1, 0}, {3, 0}}}, 1);
	ASSERT_TRUE(child.has_value());
	// the same set again is a duplicate
	EXPECT_FALSE(make_child(ctx, root, {Jld{{1, 0}, {3, 0}}}, 1).has_value());
}

TEST(Search, ZeroBudgetReturnsRoot)
{
	TaskSet ts = test::running_example();
	Search_result r = search(ts, with_expansions(Objective::age, 0));
	EXPECT_EQ(r.terminated_by, "budget");
	EXPECT_EQ(r.nodes_expanded, 0u);
	EXPECT_TRUE(r.added.empty());
	ASSERT_EQ(r.best.latencies.size(), 1u);
	EXPECT_EQ(r.best.latencies[0], (Latency_pair{11, 8}));

	Search_options secs;
	secs.budget = {0.0, std::nullopt};
	EXPECT_EQ(search(ts, secs).best.latencies[0], (Latency_pair{11, 8}));
}

TEST(Search, RunningExampleAgeReachesNine)
{
	TaskSet ts = test::running_example();
	Search_options opt;
	opt.objective = Objective::age;
	opt.budget = {5.0, std::nullopt};
	const auto t0 = std::chrono::steady_clock::now();
	Search_result r = search(ts, opt);
	EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.5);
	EXPECT_LE(r.best.latencies[0].alpha, 9);
	EXPECT_EQ(r.terminated_by, "solution");
	expect_consistent(ts, r);
	// the simulator agrees on the returned intervals
	auto m = measure_all(ts, r.best.intervals);
	EXPECT_EQ(m[0].worst_age, r.best.latencies[0].alpha);
	EXPECT_EQ(m[0].worst_reaction, r.best.latencies[0].delta);
}

TEST(Search, ReactionAndBothObjectives)
{
	TaskSet ts = test::running_example();
	for (Objective o : {Objective::reaction, Objective::both}) {
		Search_result r = search(ts, with_expansions(o, 500));
		EXPECT_LT(r.best.latencies[0].delta, 8) << to_string(o);
		EXPECT_LE(r.best.latencies[0].alpha, 11) << to_string(o);
		expect_consistent(ts, r);
	}
}

// Writer and reader alone on separate cores: ordering the reader after the
// writer lets it read the fresh value within the same period.
TEST(Search, CrossCoreDependencyAlignsTheChain)
{
	TaskSet ts({{1, 1, 4, 0}, {2, 2, 4, 1}}, {{1, 2}}, 2);
	Search_result r = search(ts, with_expansions(Objective::both, 50));
	EXPECT_EQ(r.root.latencies[0], (Latency_pair{6, 6}));
	EXPECT_EQ(r.best.latencies[0], (Latency_pair{3, 3}));
	EXPECT_TRUE(r.best.jlds.contains(Jld{{1, 0}, {2, 0}}));
	EXPECT_EQ(r.terminated_by, "solution");
	auto m = measure_all(ts, r.best.intervals);
	EXPECT_EQ(m[0].worst_age, 3);
	EXPECT_EQ(m[0].worst_reaction, 3);
}

TEST(Search, NoChainsIsTriviallySolved)
{
	TaskSet ts({{1, 1, 4, 0}, {2, 2, 4, 1}}, {}, 2);
	Search_result r = search(ts, with_expansions(Objective::age, 50));
	EXPECT_TRUE(r.added.empty());
	EXPECT_EQ(r.terminated_by, "solution");
}

TEST(Search, InfeasibleInputThrows)
{
	TaskSet ts({{1, 2, 3, 0}, {2, 2, 3, 0}}, {{1, 2}}, 1);
	EXPECT_THROW(search(ts, with_expansions(Objective::age, 1)), Infeasible_error);
}

TEST(Search, InitialDependenciesAreKept)
{
	TaskSet ts = test::running_example();
	Jld_set initial{Jld{{2, 0}, {1, 0}}};
	Search_result r = search(ts, with_expansions(Objective::age, 20), initial);
	EXPECT_TRUE(r.best.jlds.contains(Jld{{2, 0}, {1, 0}}));
	EXPECT_FALSE(r.added.contains(Jld{{2, 0}, {1, 0}}));
}

TEST(Search, DeterministicUnderExpansionBudget)
{
	auto run = [](const TaskSet& ts) {
		Search_result r = search(ts, with_expansions(Objective::both, 6));
		return std::tuple(r.best.jlds, r.best.latencies, r.nodes_expanded, r.nodes_evaluated,
		                  r.terminated_by);
	};
	for (std::uint64_t seed = 0; seed < 20; ++seed) {
		TaskSet ts = test::small_random_set(seed);
		EXPECT_EQ(run(ts), run(ts)) << seed;
	}
	Gen_profile p = automotive_profile();
	p.seed = 3;
	TaskSet big = gen_taskset(p);
	EXPECT_EQ(run(big), run(big));
}

TEST(Search, ResultsAreFeasibleAndWithinLetOnRandomSets)
{
	for (std::uint64_t seed = 0; seed < 40; ++seed) {
		TaskSet ts = test::small_random_set(seed);
		Search_result r = search(ts, with_expansions(Objective::age, 30));
		expect_consistent(ts, r);
		EXPECT_GE(evaluate(r.root.latencies, r.best.latencies, Objective::age).improvement, 0.0);
	}
}

TEST(Search, ImprovesAnAutomotiveSet)
{
	Gen_profile p = automotive_profile();
	p.seed = 1;
	TaskSet ts = gen_taskset(p);
	Search_result r = search(ts, with_expansions(Objective::age, 15));
	EXPECT_GT(r.best.eval.score, 0);
	EXPECT_FALSE(r.added.empty());
	expect_consistent(ts, r);
}
