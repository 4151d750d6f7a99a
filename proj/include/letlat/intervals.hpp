#ifndef LETLAT_INTERVALS_HPP
#define LETLAT_INTERVALS_HPP

#include <algorithm>
#include <map>
#include <string>

#include "letlat/schedule.hpp"
#include "letlat/task_model.hpp"

namespace letlat {

enum class Interval_model { let, wcrt, schedule_aware };

inline const char* to_string(Interval_model m)
{
	switch (m) {
	case Interval_model::let: return "let";
	case Interval_model::wcrt: return "wcrt";
	case Interval_model::schedule_aware: return "sa";
	}
	return "?";
}

inline Interval_model parse_interval_model(const std::string& s)
{
	if (s == "let")
		return Interval_model::let;
	if (s == "wcrt" || s == "wcrt-let")
		return Interval_model::wcrt;
	if (s == "sa" || s == "sa-let")
		return Interval_model::schedule_aware;
	throw Model_error("unknown interval model '" + s + "' (expected let, wcrt or sa)");
}

// Communication interval relative to each job's release: the read happens at
// release + begin, the write at release + end.
struct Interval
{
	tick_t begin = 0;
	tick_t end = 0;

	tick_t length() const { return end - begin; }

	bool contains(const Interval& o) const { return begin <= o.begin && o.end <= end; }

	friend bool operator==(const Interval&, const Interval&) = default;
};

struct Interval_assignment
{
	Interval_model model = Interval_model::let;
	std::map<int, Interval> by_task;

	const Interval& at(int task) const
	{
		auto it = by_task.find(task);
		if (it == by_task.end())
			throw Model_error("no interval for task " + std::to_string(task));
		return it->second;
	}

	// sum of interval lengths over all tasks
	tick_t total_length() const
	{
		tick_t sum = 0;
		for (const auto& [_, iv] : by_task)
			sum += iv.length();
		return sum;
	}

	friend bool operator==(const Interval_assignment&, const Interval_assignment&) = default;
};

// Throws Model_error unless 0 <= begin < end <= T and end - begin >= C for
// every task of the set.
inline void validate(const TaskSet& ts, const Interval_assignment& a)
{
	for (const Task& t : ts.tasks()) {
		const Interval& iv = a.at(t.id);
		if (iv.begin < 0 || iv.begin >= iv.end || iv.end > t.period)
			throw Model_error("task " + std::to_string(t.id) + ": interval [" +
			                  std::to_string(iv.begin) + "," + std::to_string(iv.end) +
			                  "] outside [0," + std::to_string(t.period) + "]");
		if (iv.length() < t.wcet)
			throw Model_error("task " + std::to_string(t.id) + ": interval shorter than wcet");
	}
}

inline Interval_assignment classic_let(const TaskSet& ts)
{
	Interval_assignment a{Interval_model::let, {}};
	for (const Task& t : ts.tasks())
		a.by_task[t.id] = Interval{0, t.period};
	return a;
}

// begin = min erp, end = max lwp over all jobs in the hyperperiod
inline Interval_assignment schedule_aware(const Schedule& s)
{
	Interval_assignment a{Interval_model::schedule_aware, {}};
	for (const Execution_interval& ei : execution_intervals(s)) {
		auto [it, fresh] = a.by_task.try_emplace(ei.task, Interval{ei.erp, ei.lwp});
		if (!fresh) {
			it->second.begin = std::min(it->second.begin, ei.erp);
			it->second.end = std::max(it->second.end, ei.lwp);
		}
	}
	return a;
}

// Interval ends at the response time observed on the schedule, reads stay at
// the release.
inline Interval_assignment wcrt_let(const Schedule& s)
{
	Interval_assignment a = schedule_aware(s);
	a.model = Interval_model::wcrt;
	for (auto& [_, iv] : a.by_task)
		iv.begin = 0;
	return a;
}

} // namespace letlat

#endif
