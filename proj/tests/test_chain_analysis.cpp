#include <gtest/gtest.h>

#include <set>

#include "letlat/chain_analysis.hpp"
#include "letlat/schedule.hpp"
#include "letlat/sim_oracle.hpp"
#include "support.hpp"

using namespace letlat;

namespace {

Comm_pair pair_of(tick_t tw, Interval iw, tick_t tr, Interval ir) { return Comm_pair{tw, iw, tr, ir}; }

Interval_assignment sa_of(const TaskSet& ts, const Jld_set& jlds = {})
{
	return schedule_aware(schedule_edf(ts, jlds));
}

} // namespace

TEST(PublishingPoint, ClassicLetRunningExample)
{
	EXPECT_EQ(publishing_point(pair_of(3, {0, 3}, 5, {0, 5}), 1), 3);
	EXPECT_EQ(publishing_point(pair_of(5, {0, 5}, 3, {0, 3}), 2), 10);
}

TEST(ReadingPoint, ClassicLetRunningExample)
{
	EXPECT_EQ(reading_point(pair_of(3, {0, 3}, 5, {0, 5}), 1), 5);
	EXPECT_EQ(reading_point(pair_of(5, {0, 5}, 3, {0, 3}), 2), 12);
}

TEST(PublishingPoint, ScheduleAwareWriterFasterThanReader)
{
	// writer job released at 3 writes at 4
	EXPECT_EQ(publishing_point(pair_of(3, {0, 1}, 5, {0, 3}), 1), 4);
	EXPECT_EQ(reading_point(pair_of(3, {0, 1}, 5, {0, 3}), 1), 5);
}

TEST(ReadingPoint, ScheduleAwareWriterSlowerThanReader)
{
	// publish at 3, next read 1 after the release at 3
	EXPECT_EQ(publishing_point(pair_of(5, {0, 3}, 3, {1, 2}), 1), 3);
	EXPECT_EQ(reading_point(pair_of(5, {0, 3}, 3, {1, 2}), 1), 4);
}

TEST(PublishingPoint, NegativeForFirstIndexWhenTheWriteIsLate)
{
	EXPECT_LT(publishing_point(pair_of(5, {0, 3}, 3, {1, 2}), 0), 0);
}

// Both point formulas give the same (P, Q) pairs when the periods are equal; only
// the index may differ.
TEST(PointFormulas, AgreeOnEqualPeriods)
{
	for (tick_t t = 1; t <= 8; ++t)
		for (tick_t we = 1; we <= t; ++we)
			for (tick_t rb = 0; rb < t; ++rb) {
				const tick_t slack = t - we;
				std::set<std::pair<tick_t, tick_t>> by_reads, by_writes;
				for (tick_t n = -2; n < 10; ++n) {
					by_reads.insert({floor_div(n * t + rb + slack, t) * t - slack, n * t + rb});
					const tick_t p = n * t - slack;
					by_writes.insert({p, ceil_div(p - rb, t) * t + rb});
				}
				Comm_pair cp{t, {0, we}, t, {rb, t}};
				for (tick_t n = 0; n < 6; ++n) {
					const std::pair<tick_t, tick_t> pq{publishing_point(cp, n), reading_point(cp, n)};
					EXPECT_TRUE(by_reads.count(pq));
					EXPECT_TRUE(by_writes.count(pq)) << t << " " << we << " " << rb << " " << n;
				}
			}
}

// P(n) is the last write at or before Q(n), checked by scanning writer jobs.
TEST(PointFormulas, PublishingPointIsLastWriteBeforeReadingPoint)
{
	for (tick_t tw = 1; tw <= 7; ++tw)
		for (tick_t tr = 1; tr <= 7; ++tr)
			for (tick_t we = 1; we <= tw; ++we)
				for (tick_t rb = 0; rb < tr; ++rb) {
					Comm_pair cp{tw, {0, we}, tr, {rb, tr}};
					for (tick_t n = 0; n < 6; ++n) {
						const tick_t q = reading_point(cp, n);
						const tick_t p = publishing_point(cp, n);
						tick_t last = std::numeric_limits<tick_t>::min();
						for (tick_t k = -3; k * tw + we <= q; ++k)
							last = k * tw + we;
						EXPECT_EQ(p, last) << tw << " " << tr << " " << we << " " << rb << " " << n;
						// Q is a read of the reader
						EXPECT_EQ(floor_div(q - rb, tr) * tr + rb, q);
						if (tw >= tr) {
							// and the first read at or after P
							EXPECT_LT(q - tr, p);
						}
					}
				}
}

TEST(BasicPaths, RunningExampleClassicLet)
{
	TaskSet ts = test::running_example();
	Chain_latencies cl = worst_case(ts, 0, classic_let(ts));
	EXPECT_EQ(cl.alpha, 15);
	EXPECT_EQ(cl.delta, 15);
	ASSERT_EQ(cl.paths.size(), 3u);
	std::set<tick_t> inputs;
	for (const Basic_path& p : cl.paths) {
		EXPECT_EQ(p.points.size(), 2u);
		EXPECT_EQ(p.theta, p.last_read() - p.first_publish());
		inputs.insert(((p.input % 15) + 15) % 15);
	}
	EXPECT_EQ(inputs, (std::set<tick_t>{0, 6, 12}));
}

TEST(BasicPaths, RunningExampleScheduleAware)
{
	TaskSet ts = test::running_example();
	Chain_latencies cl = worst_case(ts, 0, sa_of(ts));
	EXPECT_EQ(cl.alpha, 11);
	EXPECT_EQ(cl.delta, 8);
	ASSERT_EQ(cl.paths.size(), 3u);
	bool found = false;
	for (const Basic_path& p : cl.paths)
		if (((p.input % 15) + 15) % 15 == 12) {
			EXPECT_EQ(p.alpha, 11);
			found = true;
		}
	EXPECT_TRUE(found);
}

TEST(BasicPaths, RunningExampleWithDependencies)
{
	TaskSet ts = test::running_example();
	Chain_latencies cl = worst_case(ts, 0, sa_of(ts, test::running_example_jlds()));
	EXPECT_EQ(cl.alpha, 9);
	EXPECT_EQ(cl.delta, 9);
	EXPECT_EQ(cl.paths.size(), 3u);
}

TEST(BasicPaths, AlphaAndDeltaFormulas)
{
	TaskSet ts = test::running_example();
	Interval_assignment a = sa_of(ts);
	for (const Basic_path& p : enumerate_basic_paths(ts, 0, a)) {
		// (e1 - b1) + theta + phi - b_e - (T_e - e_e)
		EXPECT_EQ(p.alpha, (1 - 0) + p.theta + p.phi - 1 - (3 - 2));
		// (e1 - b1) + theta + (e_e - b_e)
		EXPECT_EQ(p.delta, (1 - 0) + p.theta + (2 - 1));
		EXPECT_GT(p.phi, 0);
	}
}

// Kept paths per HP_E equal the inputs that reach the output per HP_E in
// simulation; worst cases equal the simulated ones.
TEST(BasicPaths, MatchSimulationOnRandomSets)
{
	for (std::uint64_t seed = 0; seed < 60; ++seed) {
		TaskSet ts = test::small_random_set(seed);
		Schedule s = schedule_edf(ts);
		for (const Interval_assignment& a : {classic_let(ts), wcrt_let(s), schedule_aware(s)}) {
			std::vector<Empirical_latencies> m = measure_all(ts, a);
			for (std::size_t c = 0; c < ts.chains().size(); ++c) {
				Chain_latencies cl = worst_case(ts, c, a);
				EXPECT_EQ(cl.alpha, m[c].worst_age) << seed << " chain " << c;
				EXPECT_EQ(cl.delta, m[c].worst_reaction) << seed << " chain " << c;
				const tick_t per_hp = ts.hyperperiod() / ts.chains()[c].hyperperiod;
				EXPECT_EQ(static_cast<tick_t>(cl.paths.size()) * per_hp,
				          static_cast<tick_t>(m[c].propagated))
				    << seed << " chain " << c;
			}
		}
	}
}

// Nested intervals never increase data age.
TEST(BasicPaths, AgeIsMonotoneUnderNesting)
{
	for (std::uint64_t seed = 0; seed < 100; ++seed) {
		TaskSet ts = test::small_random_set(seed);
		Schedule s = schedule_edf(ts);
		auto let = analyze(ts, classic_let(ts));
		auto wcrt = analyze(ts, wcrt_let(s));
		auto sa = analyze(ts, schedule_aware(s));
		for (std::size_t c = 0; c < ts.chains().size(); ++c) {
			EXPECT_LE(sa[c].alpha, wcrt[c].alpha) << seed;
			EXPECT_LE(wcrt[c].alpha, let[c].alpha) << seed;
		}
	}
}

// A chain's results depend on its own tasks only, not on the system
// hyperperiod.
TEST(BasicPaths, IndependentOfUnrelatedTasks)
{
	TaskSet a = test::running_example();
	TaskSet b({{1, 1, 3, 0}, {2, 1, 5, 0}, {3, 1, 3, 0}, {4, 1, 7, 1}}, {{1, 2}, {2, 3}}, 2);
	EXPECT_EQ(b.hyperperiod(), 105);
	auto la = worst_case(a, 0, classic_let(a));
	auto lb = worst_case(b, 0, classic_let(b));
	EXPECT_EQ(la.alpha, lb.alpha);
	EXPECT_EQ(la.delta, lb.delta);
	EXPECT_EQ(la.paths.size(), lb.paths.size());
}
