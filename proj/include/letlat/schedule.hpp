#ifndef LETLAT_SCHEDULE_HPP
#define LETLAT_SCHEDULE_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "letlat/task_model.hpp"

namespace letlat {

struct Job_id
{
	int task = 0;
	tick_t job = 0;

	friend auto operator<=>(const Job_id&, const Job_id&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Job_id& j)
{
	return os << "(" << j.task << "," << j.job << ")";
}

// predecessor must complete before successor may start
struct Jld
{
	Job_id predecessor;
	Job_id successor;

	friend auto operator<=>(const Jld&, const Jld&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Jld& d)
{
	return os << d.predecessor << "<" << d.successor;
}

// Canonically ordered set of job-level dependencies.
class Jld_set
{
public:
	Jld_set() = default;
	Jld_set(std::initializer_list<Jld> l) { for (const Jld& d : l) insert(d); }
	explicit Jld_set(const std::vector<Jld>& v) { for (const Jld& d : v) insert(d); }

	bool insert(const Jld& d)
	{
		auto it = std::lower_bound(items_.begin(), items_.end(), d);
		if (it != items_.end() && *it == d)
			return false;
		items_.insert(it, d);
		return true;
	}

	bool contains(const Jld& d) const
	{
		return std::binary_search(items_.begin(), items_.end(), d);
	}

	std::size_t size() const { return items_.size(); }
	bool empty() const { return items_.empty(); }
	auto begin() const { return items_.begin(); }
	auto end() const { return items_.end(); }
	const std::vector<Jld>& items() const { return items_; }

	friend auto operator<=>(const Jld_set&, const Jld_set&) = default;

private:
	std::vector<Jld> items_;
};

struct Segment
{
	int task = 0;
	tick_t job = 0;
	tick_t start = 0;
	tick_t end = 0;

	friend bool operator==(const Segment&, const Segment&) = default;
};

// Per-job summary of a computed schedule. Times are absolute.
struct Job_record
{
	Job_id id;
	int core = 0;
	tick_t release = 0;
	tick_t deadline = 0;
	tick_t first_start = 0;
	tick_t last_end = 0;
};

struct Execution_interval
{
	int task = 0;
	tick_t job = 0;
	tick_t erp = 0; // first start, relative to release
	tick_t lwp = 0; // completion, relative to release

	friend bool operator==(const Execution_interval&, const Execution_interval&) = default;
};

class Schedule
{
public:
	tick_t hyperperiod = 0;
	std::vector<std::vector<Segment>> cores;
	Jld_set jlds;
	// sorted by job id
	std::vector<Job_record> jobs;

	const Job_record& job(Job_id id) const
	{
		auto it = std::lower_bound(jobs.begin(), jobs.end(), id,
		                           [](const Job_record& r, const Job_id& k) { return r.id < k; });
		if (it == jobs.end() || it->id != id) {
			std::ostringstream os;
			os << "job " << id << " not in schedule";
			throw Model_error(os.str());
		}
		return *it;
	}

	bool has_job(Job_id id) const
	{
		auto it = std::lower_bound(jobs.begin(), jobs.end(), id,
		                           [](const Job_record& r, const Job_id& k) { return r.id < k; });
		return it != jobs.end() && it->id == id;
	}
};

class Infeasible_error : public std::runtime_error
{
public:
	Infeasible_error(const std::string& what, Job_id j)
	: std::runtime_error(what), job(j)
	{
	}

	Job_id job;
};

namespace detail {

inline void check_jlds(const TaskSet& ts, const Jld_set& jlds)
{
	for (const Jld& d : jlds) {
		for (const Job_id& j : {d.predecessor, d.successor}) {
			if (!ts.has_task(j.task) || j.job < 0 || j.job >= ts.jobs_per_hyperperiod(j.task)) {
				std::ostringstream os;
				os << "job-level dependency " << d << " references invalid job " << j;
				throw Model_error(os.str());
			}
		}
		if (d.predecessor == d.successor) {
			std::ostringstream os;
			os << "job-level dependency " << d << " relates a job to itself";
			throw Model_error(os.str());
		}
	}

	// cycle check over the dependency graph
	std::map<Job_id, std::vector<Job_id>> succ;
	for (const Jld& d : jlds)
		succ[d.predecessor].push_back(d.successor);
	std::map<Job_id, int> mark;
	auto visit = [&](auto&& self, const Job_id& n) -> bool {
		mark[n] = 1;
		if (auto it = succ.find(n); it != succ.end())
			for (const Job_id& s : it->second) {
				int m = mark[s];
				if (m == 1)
					return true;
				if (m == 0 && self(self, s))
					return true;
			}
		mark[n] = 2;
		return false;
	};
	for (const auto& [n, _] : succ)
		if (mark[n] == 0 && visit(visit, n)) {
			std::ostringstream os;
			os << "job-level dependencies form a cycle through job " << n;
			throw Model_error(os.str());
		}
}

} // namespace detail

// Preemptive partitioned EDF over one hyperperiod. A job is eligible once it
// is released and all its dependency predecessors (on any core) have
// completed. Deadline ties go to the lower task id, then the lower job index.
inline Schedule schedule_edf(const TaskSet& ts, const Jld_set& jlds = {})
{
	detail::check_jlds(ts, jlds);

	const tick_t hp = ts.hyperperiod();

	struct State
	{
		Job_record rec;
		tick_t remaining = 0;
		int waiting_for = 0;
		bool started = false;
		bool done = false;
		std::vector<std::size_t> successors;
	};

	std::vector<State> jobs;
	{
		std::size_t total = 0;
		for (const Task& t : ts.tasks())
			total += static_cast<std::size_t>(hp / t.period);
		jobs.reserve(total);
	}
	std::map<int, std::size_t> base; // first job of each task
	for (const Task& t : ts.tasks()) {
		base[t.id] = jobs.size();
		for (tick_t k = 0; k < hp / t.period; ++k) {
			State s;
			s.rec.id = Job_id{t.id, k};
			s.rec.core = t.core;
			s.rec.release = k * t.period;
			s.rec.deadline = (k + 1) * t.period;
			s.remaining = t.wcet;
			jobs.push_back(std::move(s));
		}
	}
	for (const Jld& d : jlds) {
		std::size_t p = base.at(d.predecessor.task) + static_cast<std::size_t>(d.predecessor.job);
		std::size_t s = base.at(d.successor.task) + static_cast<std::size_t>(d.successor.job);
		jobs[p].successors.push_back(s);
		++jobs[s].waiting_for;
	}

	// releases in time order
	std::vector<std::size_t> release_order(jobs.size());
	for (std::size_t i = 0; i < jobs.size(); ++i)
		release_order[i] = i;
	std::stable_sort(release_order.begin(), release_order.end(), [&](std::size_t a, std::size_t b) {
		return jobs[a].rec.release < jobs[b].rec.release;
	});

	using Key = std::tuple<tick_t, int, tick_t, std::size_t>; // deadline, task, job, index
	auto key_of = [&](std::size_t i) {
		return Key{jobs[i].rec.deadline, jobs[i].rec.id.task, jobs[i].rec.id.job, i};
	};
	std::vector<std::set<Key>> ready(ts.num_cores());
	std::priority_queue<Key, std::vector<Key>, std::greater<>> deadlines;
	for (std::size_t i = 0; i < jobs.size(); ++i)
		deadlines.push(key_of(i));

	Schedule sched;
	sched.hyperperiod = hp;
	sched.jlds = jlds;
	sched.cores.assign(ts.num_cores(), {});

	std::size_t next_release = 0;
	std::size_t completed = 0;
	tick_t now = 0;
	std::vector<std::optional<std::size_t>> running(ts.num_cores());
	std::vector<std::size_t> finished;

	auto make_ready = [&](std::size_t i) { ready[jobs[i].rec.core].insert(key_of(i)); };

	while (completed < jobs.size()) {
		while (next_release < release_order.size() &&
		       jobs[release_order[next_release]].rec.release <= now) {
			std::size_t i = release_order[next_release++];
			if (jobs[i].waiting_for == 0)
				make_ready(i);
		}

		while (!deadlines.empty() && jobs[std::get<3>(deadlines.top())].done)
			deadlines.pop();
		if (!deadlines.empty() && std::get<0>(deadlines.top()) <= now) {
			const auto& r = jobs[std::get<3>(deadlines.top())].rec;
			std::ostringstream os;
			os << "deadline miss: job " << r.id << " (deadline " << r.deadline << ")";
			throw Infeasible_error(os.str(), r.id);
		}

		tick_t next = std::numeric_limits<tick_t>::max();
		if (next_release < release_order.size())
			next = jobs[release_order[next_release]].rec.release;
		if (!deadlines.empty())
			next = std::min(next, std::get<0>(deadlines.top()));

		for (int c = 0; c < ts.num_cores(); ++c) {
			running[c].reset();
			if (!ready[c].empty()) {
				std::size_t i = std::get<3>(*ready[c].begin());
				running[c] = i;
				next = std::min(next, now + jobs[i].remaining);
			}
		}

		if (next == std::numeric_limits<tick_t>::max()) {
			// nothing runs, nothing will be released: blocked forever
			for (const State& s : jobs)
				if (!s.done) {
					std::ostringstream os;
					os << "job " << s.rec.id << " can never become eligible";
					throw Infeasible_error(os.str(), s.rec.id);
				}
		}

		finished.clear();
		for (int c = 0; c < ts.num_cores(); ++c) {
			if (!running[c])
				continue;
			State& s = jobs[*running[c]];
			auto& segs = sched.cores[c];
			if (!segs.empty() && segs.back().end == now && segs.back().task == s.rec.id.task &&
			    segs.back().job == s.rec.id.job)
				segs.back().end = next;
			else
				segs.push_back(Segment{s.rec.id.task, s.rec.id.job, now, next});
			if (!s.started) {
				s.started = true;
				s.rec.first_start = now;
			}
			s.remaining -= next - now;
			if (s.remaining == 0) {
				s.done = true;
				s.rec.last_end = next;
				ready[c].erase(key_of(*running[c]));
				finished.push_back(*running[c]);
				++completed;
			}
		}
		now = next;

		for (std::size_t f : finished) {
			if (jobs[f].rec.last_end > jobs[f].rec.deadline) {
				std::ostringstream os;
				os << "deadline miss: job " << jobs[f].rec.id << " completes at "
				   << jobs[f].rec.last_end << " after deadline " << jobs[f].rec.deadline;
				throw Infeasible_error(os.str(), jobs[f].rec.id);
			}
			for (std::size_t s : jobs[f].successors)
				if (--jobs[s].waiting_for == 0 && jobs[s].rec.release <= now)
					make_ready(s);
		}
	}

	sched.jobs.reserve(jobs.size());
	for (const State& s : jobs)
		sched.jobs.push_back(s.rec);
	std::sort(sched.jobs.begin(), sched.jobs.end(),
	          [](const Job_record& a, const Job_record& b) { return a.id < b.id; });
	return sched;
}

inline std::vector<Execution_interval> execution_intervals(const Schedule& s)
{
	std::vector<Execution_interval> out;
	out.reserve(s.jobs.size());
	for (const Job_record& r : s.jobs)
		out.push_back(Execution_interval{r.id.task, r.id.job, r.first_start - r.release,
		                                 r.last_end - r.release});
	return out;
}

struct Feasibility
{
	bool feasible = false;
	std::string report;

	explicit operator bool() const { return feasible; }
};

inline Feasibility is_feasible(const TaskSet& ts, const Jld_set& jlds = {})
{
	try {
		schedule_edf(ts, jlds);
		return {true, {}};
	} catch (const Infeasible_error& e) {
		return {false, e.what()};
	} catch (const Model_error& e) {
		return {false, e.what()};
	}
}

// One row per core, one character per tick: '.' idle, otherwise the last
// digit of the running task id. Wide hyperperiods are truncated.
inline std::string gantt(const Schedule& s, tick_t max_ticks = 200)
{
	std::ostringstream os;
	tick_t width = std::min(s.hyperperiod, max_ticks);
	for (std::size_t c = 0; c < s.cores.size(); ++c) {
		std::string row(static_cast<std::size_t>(width), '.');
		for (const Segment& seg : s.cores[c])
			for (tick_t t = seg.start; t < seg.end && t < width; ++t)
				row[static_cast<std::size_t>(t)] = static_cast<char>('0' + (seg.task % 10));
		os << "core " << c << " |" << row << "|\n";
	}
	for (std::size_t c = 0; c < s.cores.size(); ++c)
		for (const Segment& seg : s.cores[c]) {
			if (seg.start >= width)
				break;
			os << "  core " << c << " " << Job_id{seg.task, seg.job} << " [" << seg.start << ","
			   << seg.end << "]\n";
		}
	return os.str();
}

} // namespace letlat

#endif
