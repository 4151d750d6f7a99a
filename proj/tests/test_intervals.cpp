#include <gtest/gtest.h>

#include "letlat/intervals.hpp"
#include "letlat/schedule.hpp"
#include "support.hpp"

using namespace letlat;

TEST(ClassicLet, SpansThePeriod)
{
	Interval_assignment a = classic_let(test::running_example());
	EXPECT_EQ(a.model, Interval_model::let);
	EXPECT_EQ(a.at(1), (Interval{0, 3}));
	EXPECT_EQ(a.at(2), (Interval{0, 5}));
	EXPECT_EQ(a.at(3), (Interval{0, 3}));
}

TEST(ScheduleAware, RunningExample)
{
	Interval_assignment a = schedule_aware(schedule_edf(test::running_example()));
	EXPECT_EQ(a.model, Interval_model::schedule_aware);
	EXPECT_EQ(a.at(1), (Interval{0, 1}));
	EXPECT_EQ(a.at(2), (Interval{0, 3}));
	EXPECT_EQ(a.at(3), (Interval{1, 2}));
}

TEST(ScheduleAware, RunningExampleWithDependencies)
{
	Interval_assignment a =
	    schedule_aware(schedule_edf(test::running_example(), test::running_example_jlds()));
	EXPECT_EQ(a.at(1), (Interval{0, 2}));
	EXPECT_EQ(a.at(2), (Interval{0, 1}));
	EXPECT_EQ(a.at(3), (Interval{1, 3}));
}

TEST(WcrtLet, ReadsAtReleaseWritesAtResponseTime)
{
	Interval_assignment a = wcrt_let(schedule_edf(test::running_example()));
	EXPECT_EQ(a.model, Interval_model::wcrt);
	EXPECT_EQ(a.at(1), (Interval{0, 1}));
	EXPECT_EQ(a.at(2), (Interval{0, 3}));
	EXPECT_EQ(a.at(3), (Interval{0, 2}));
}

TEST(ScheduleAware, IsolatedTaskRunsAtRelease)
{
	TaskSet ts({{1, 2, 5, 0}, {2, 1, 4, 1}}, {}, 2);
	Interval_assignment a = schedule_aware(schedule_edf(ts));
	EXPECT_EQ(a.at(1), (Interval{0, 2}));
	EXPECT_EQ(a.at(2), (Interval{0, 1}));
}

TEST(Validate, RejectsBadIntervals)
{
	TaskSet ts = test::running_example();
	Interval_assignment a = classic_let(ts);
	EXPECT_NO_THROW(validate(ts, a));
	a.by_task[2] = Interval{0, 6};
	EXPECT_THROW(validate(ts, a), Model_error);
	a.by_task[2] = Interval{-1, 3};
	EXPECT_THROW(validate(ts, a), Model_error);
	a.by_task[2] = Interval{2, 2};
	EXPECT_THROW(validate(ts, a), Model_error);
	a.by_task.erase(2);
	EXPECT_THROW(validate(ts, a), Model_error);
}

TEST(ModelNames, RoundTrip)
{
	for (Interval_model m : {Interval_model::let, Interval_model::wcrt, Interval_model::schedule_aware})
		EXPECT_EQ(parse_interval_model(to_string(m)), m);
	EXPECT_THROW(parse_interval_model("fifo"), Model_error);
}

// SA within WCRT within [0, T]; the SA bounds are attained by some job.
TEST(Nesting, HoldsOnRandomSets)
{
	for (std::uint64_t seed = 0; seed < 150; ++seed) {
		TaskSet ts = test::small_random_set(seed);
		Schedule s = schedule_edf(ts);
		Interval_assignment let = classic_let(ts), wcrt = wcrt_let(s), sa = schedule_aware(s);
		for (const Task& t : ts.tasks()) {
			EXPECT_TRUE(let.at(t.id).contains(wcrt.at(t.id))) << seed << " task " << t.id;
			EXPECT_TRUE(wcrt.at(t.id).contains(sa.at(t.id))) << seed << " task " << t.id;
			EXPECT_GE(sa.at(t.id).length(), t.wcet);
			bool begin_hit = false, end_hit = false;
			for (const Execution_interval& e : execution_intervals(s)) {
				if (e.task != t.id)
					continue;
				begin_hit = begin_hit || e.erp == sa.at(t.id).begin;
				end_hit = end_hit || e.lwp == sa.at(t.id).end;
			}
			EXPECT_TRUE(begin_hit && end_hit) << seed << " task " << t.id;
		}
		EXPECT_NO_THROW(validate(ts, sa));
		EXPECT_NO_THROW(validate(ts, wcrt));
	}
}
