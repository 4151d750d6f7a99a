#ifndef LETLAT_JLD_SEARCH_HPP
#define LETLAT_JLD_SEARCH_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "letlat/chain_analysis.hpp"
#include "letlat/intervals.hpp"
#include "letlat/schedule.hpp"

namespace letlat {

enum class Objective { age, reaction, both };

inline const char* to_string(Objective o)
{
	switch (o) {
	case Objective::age: return "age";
	case Objective::reaction: return "reaction";
	case Objective::both: return "both";
	}
	return "?";
}

inline Objective parse_objective(const std::string& s)
{
	if (s == "age")
		return Objective::age;
	if (s == "reaction")
		return Objective::reaction;
	if (s == "both")
		return Objective::both;
	throw Model_error("unknown objective '" + s + "' (expected age, reaction or both)");
}

struct Latency_pair
{
	tick_t alpha = 0;
	tick_t delta = 0;

	friend bool operator==(const Latency_pair&, const Latency_pair&) = default;
};

// Whether `now` counts as an improvement of one chain over `root`.
inline bool improves(const Latency_pair& root, const Latency_pair& now, Objective o)
{
	switch (o) {
	case Objective::age: return now.alpha < root.alpha;
	case Objective::reaction: return now.delta < root.delta;
	case Objective::both:
		return now.alpha <= root.alpha && now.delta <= root.delta &&
		       (now.alpha < root.alpha || now.delta < root.delta);
	}
	return false;
}

struct Evaluation
{
	int score = 0;            // chains improved over the root
	double improvement = 0.0; // sum over chains of the relative objective reduction
};

inline Evaluation evaluate(const std::vector<Latency_pair>& root, const std::vector<Latency_pair>& now,
                           Objective o)
{
	Evaluation ev;
	for (std::size_t c = 0; c < root.size(); ++c) {
		if (improves(root[c], now[c], o))
			++ev.score;
		auto rel = [](tick_t r, tick_t v) {
			return r > 0 ? static_cast<double>(r - v) / static_cast<double>(r) : 0.0;
		};
		if (o != Objective::reaction)
			ev.improvement += rel(root[c].alpha, now[c].alpha);
		if (o != Objective::age)
			ev.improvement += rel(root[c].delta, now[c].delta);
	}
	return ev;
}

// Child ordering: the targeted task's interval should start later and end
// earlier than in the parent. Remaining ties: fewer jobs pinning the targeted
// task's bounds, less total interval length.
struct Heuristic_key
{
	tick_t begin_gain = 0;
	tick_t end_gain = 0;
	tick_t total_length = 0;
	std::size_t pinned = 0;

	// true if `a` is preferred over `b`
	friend bool preferred(const Heuristic_key& a, const Heuristic_key& b)
	{
		if (a.begin_gain != b.begin_gain)
			return a.begin_gain > b.begin_gain;
		if (a.end_gain != b.end_gain)
			return a.end_gain > b.end_gain;
		if (a.pinned != b.pinned)
			return a.pinned < b.pinned;
		return a.total_length < b.total_length;
	}

	friend bool operator==(const Heuristic_key&, const Heuristic_key&) = default;
};

struct Search_node
{
	Jld_set jlds;
	Interval_assignment intervals;
	std::vector<Latency_pair> latencies;
	Evaluation eval;
	Heuristic_key key;
	int target_task = -1;
	std::size_t cursor = 0; // next entry of the target-job sequence to expand
	std::size_t depth = 0;
	std::uint64_t serial = 0;
};

struct Search_budget
{
	std::optional<double> seconds;
	std::optional<std::size_t> expansions;
};

struct Search_options
{
	Objective objective = Objective::age;
	Search_budget budget{60.0, std::nullopt};
	// candidates tried per expansion, most promising first; 0 tries all
	std::size_t max_children = 16;
};

struct Search_result
{
	Search_node root;
	Search_node best;
	Jld_set added; // best.jlds minus the root's
	std::size_t nodes_expanded = 0;
	std::size_t nodes_evaluated = 0;
	double wall_seconds = 0;
	std::string terminated_by; // solution | budget | exhausted
	Schedule best_schedule;
};

inline std::vector<Latency_pair> latencies_of(const TaskSet& ts, const Interval_assignment& a)
{
	std::vector<Latency_pair> out;
	for (std::size_t c = 0; c < ts.chains().size(); ++c) {
		Chain_latencies cl = worst_case(ts, c, a);
		out.push_back(Latency_pair{cl.alpha, cl.delta});
	}
	return out;
}

namespace detail {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v)
{
	h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
	return h;
}

inline std::uint64_t schedule_signature(const Schedule& s)
{
	std::uint64_t h = 0;
	for (const Job_record& r : s.jobs) {
		h = mix(h, static_cast<std::uint64_t>(r.first_start));
		h = mix(h, static_cast<std::uint64_t>(r.last_end));
	}
	return h;
}

inline std::uint64_t jld_signature(const Jld_set& jlds)
{
	std::uint64_t h = 0x51ed;
	for (const Jld& d : jlds) {
		h = mix(h, static_cast<std::uint64_t>(d.predecessor.task));
		h = mix(h, static_cast<std::uint64_t>(d.predecessor.job));
		h = mix(h, static_cast<std::uint64_t>(d.successor.task));
		h = mix(h, static_cast<std::uint64_t>(d.successor.job));
	}
	return h;
}

inline std::size_t pinned_jobs(const Schedule& s, int task, const Interval& iv)
{
	std::size_t n = 0;
	for (const Job_record& r : s.jobs)
		if (r.id.task == task &&
		    (r.first_start - r.release == iv.begin || r.last_end - r.release == iv.end))
			++n;
	return n;
}

} // namespace detail

// Shared state of one search: the task set, the root's latencies, and the
// dedup sets over dependency sets and resulting schedules.
class Search_context
{
public:
	Search_context(const TaskSet& ts, Objective objective, std::vector<Latency_pair> root)
	: ts_(ts), objective_(objective), root_(std::move(root))
	{
		for (const Chain& c : ts.chains())
			for (int t : c.tasks)
				chain_tasks_.insert(t);
	}

	const TaskSet& taskset() const { return ts_; }
	Objective objective() const { return objective_; }
	const std::vector<Latency_pair>& root_latencies() const { return root_; }
	const std::set<int>& chain_tasks() const { return chain_tasks_; }

	bool mark_jlds(const Jld_set& j) { return seen_jlds_.insert(detail::jld_signature(j)).second; }
	bool mark_schedule(const Schedule& s)
	{
		return seen_schedules_.insert(detail::schedule_signature(s)).second;
	}

	std::uint64_t next_serial() { return serial_++; }
	std::size_t evaluated = 0;

private:
	const TaskSet& ts_;
	Objective objective_;
	std::vector<Latency_pair> root_;
	std::set<int> chain_tasks_;
	std::unordered_set<std::uint64_t> seen_jlds_;
	std::unordered_set<std::uint64_t> seen_schedules_;
	std::uint64_t serial_ = 0;
};

// Jobs worth targeting on a schedule: for every chain task the jobs that
// pin end(I) (latest completion) and then begin(I) (earliest start),
// interleaved round-robin over the tasks in id order. With `first_task` set
// the rotation starts at that task.
inline std::vector<Job_id> target_sequence(const Search_context& ctx, const Schedule& s,
                                           const Interval_assignment& a, int first_task = -1)
{
	std::vector<int> order(ctx.chain_tasks().begin(), ctx.chain_tasks().end());
	if (auto it = std::find(order.begin(), order.end(), first_task); it != order.end())
		std::rotate(order.begin(), it, order.end());
	std::vector<std::vector<Job_id>> per_task;
	for (int task : order) {
		const Interval& iv = a.at(task);
		std::vector<Job_id> late, early;
		for (const Job_record& r : s.jobs) {
			if (r.id.task != task)
				continue;
			if (r.last_end - r.release == iv.end)
				late.push_back(r.id);
			else if (r.first_start - r.release == iv.begin)
				early.push_back(r.id);
		}
		late.insert(late.end(), early.begin(), early.end());
		per_task.push_back(std::move(late));
	}
	std::vector<Job_id> seq;
	for (std::size_t round = 0;; ++round) {
		bool any = false;
		for (const auto& jobs : per_task)
			if (round < jobs.size()) {
				seq.push_back(jobs[round]);
				any = true;
			}
		if (!any)
			break;
	}
	return seq;
}

// Candidate dependencies around `target`: every job whose release-to-deadline
// window overlaps the target's, in both directions. Dependencies the schedule
// already satisfies, duplicates, reversals of existing ones, and those that
// cannot fit before the later job's deadline are left out.
//
// Ordering: first the dependencies that can move the bound the target pins
// (target before a job preempting it when it pins the end, a job before the
// target when it pins the begin), then by distance between start times.
inline std::vector<Jld> candidate_jlds(const TaskSet& ts, const Schedule& s, const Jld_set& jlds,
                                       Job_id target, std::size_t max_children = 0,
                                       const Interval* bounds = nullptr)
{
	const Job_record& t = s.job(target);
	const tick_t ct = ts.task(target.task).wcet;
	const bool pins_end = !bounds || t.last_end - t.release == bounds->end;
	const bool pins_begin = !bounds || t.first_start - t.release == bounds->begin;
	struct Cand
	{
		bool useful;
		tick_t distance;
		Jld jld;
	};
	std::vector<Cand> cands;
	for (const Task& task : ts.tasks()) {
		tick_t lo = std::max<tick_t>(0, t.release / task.period);
		tick_t hi = std::min<tick_t>(s.hyperperiod / task.period - 1,
		                             ceil_div(t.deadline, task.period) - 1);
		for (tick_t l = lo; l <= hi; ++l) {
			Job_id xid{task.id, l};
			if (xid == target)
				continue;
			const Job_record& x = s.job(xid);
			if (!(x.release < t.deadline && t.release < x.deadline))
				continue;
			const tick_t cx = task.wcet;
			const tick_t dist = x.first_start > t.first_start ? x.first_start - t.first_start
			                                                  : t.first_start - x.first_start;
			Jld before{xid, target}; // x < target
			Jld after{target, xid};  // target < x
			if (jlds.contains(before) || jlds.contains(after))
				continue;
			const bool preempts = x.core == t.core && x.first_start > t.first_start &&
			                      x.first_start < t.last_end;
			if (x.last_end > t.first_start &&
			    std::max(t.release, x.release + cx) + ct <= t.deadline)
				cands.push_back(Cand{pins_begin, dist, before});
			if (t.last_end > x.first_start &&
			    std::max(x.release, t.release + ct) + cx <= x.deadline)
				cands.push_back(Cand{pins_end && preempts, dist, after});
		}
	}
	std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
		if (a.useful != b.useful)
			return a.useful;
		if (a.distance != b.distance)
			return a.distance < b.distance;
		return a.jld < b.jld;
	});
	if (max_children > 0 && cands.size() > max_children)
		cands.resize(max_children);
	std::vector<Jld> out;
	for (const Cand& c : cands)
		out.push_back(c.jld);
	return out;
}

// Builds and evaluates the child of `parent` that adds `group`. Infeasible or
// cyclic sets and known sets or schedules give nothing.
inline std::optional<Search_node> make_child(Search_context& ctx, const Search_node& parent,
                                             const std::vector<Jld>& group, int target_task)
{
	Jld_set jlds = parent.jlds;
	bool added = false;
	for (const Jld& d : group)
		added = jlds.insert(d) || added;
	if (!added || !ctx.mark_jlds(jlds))
		return std::nullopt;
	Schedule s;
	try {
		s = schedule_edf(ctx.taskset(), jlds);
	} catch (const Infeasible_error&) {
		return std::nullopt;
	} catch (const Model_error&) {
		return std::nullopt;
	}
	if (!ctx.mark_schedule(s))
		return std::nullopt;
	++ctx.evaluated;

	Search_node child;
	child.jlds = std::move(jlds);
	child.intervals = schedule_aware(s);
	child.latencies = parent.latencies;
	const TaskSet& ts = ctx.taskset();
	for (std::size_t c = 0; c < ts.chains().size(); ++c) {
		bool touched = false;
		for (int task : ts.chains()[c].tasks)
			if (!(child.intervals.at(task) == parent.intervals.at(task)))
				touched = true;
		if (touched) {
			Chain_latencies cl = worst_case(ts, c, child.intervals);
			child.latencies[c] = Latency_pair{cl.alpha, cl.delta};
		}
	}
	child.eval = evaluate(ctx.root_latencies(), child.latencies, ctx.objective());
	const Interval& before = parent.intervals.at(target_task);
	const Interval& now = child.intervals.at(target_task);
	child.key = Heuristic_key{now.begin - before.begin, before.end - now.end,
	                          child.intervals.total_length(),
	                          detail::pinned_jobs(s, target_task, now)};
	child.target_task = target_task;
	child.depth = parent.depth + 1;
	child.serial = ctx.next_serial();
	return child;
}

// Stable order: heuristic key, then canonical dependency-set order.
inline void heuristic_order(std::vector<Search_node>& children)
{
	std::stable_sort(children.begin(), children.end(), [](const Search_node& a, const Search_node& b) {
		if (preferred(a.key, b.key))
			return true;
		if (preferred(b.key, a.key))
			return false;
		return a.jlds < b.jlds;
	});
}

// `d` together with its copies shifted by whole multiples of lcm(T_pred,
// T_succ) whose job of the target task pins the same bound as the target.
// Used when every job of a task pins a bound, as in a schedule that repeats
// within the hyperperiod.
inline std::vector<Jld> replicate(const TaskSet& ts, const Schedule& s, const Jld_set& jlds,
                                  const Jld& d, Job_id target, const Interval& bounds)
{
	const Job_record& t = s.job(target);
	const bool late = t.last_end - t.release == bounds.end;
	const bool early = t.first_start - t.release == bounds.begin;
	auto pins = [&](const Job_record& r) {
		return (late && r.last_end - r.release == bounds.end) ||
		       (early && r.first_start - r.release == bounds.begin);
	};

	const Task& pt = ts.task(d.predecessor.task);
	const Task& st = ts.task(d.successor.task);
	const tick_t l = lcm(pt.period, st.period);
	const tick_t dp = l / pt.period;
	const tick_t ds = l / st.period;
	const tick_t first = -std::min(d.predecessor.job / dp, d.successor.job / ds);
	const tick_t last = std::min((s.hyperperiod / pt.period - 1 - d.predecessor.job) / dp,
	                             (s.hyperperiod / st.period - 1 - d.successor.job) / ds);

	std::vector<Jld> out;
	for (tick_t m = first; m <= last; ++m) {
		Jld r{{d.predecessor.task, d.predecessor.job + m * dp},
		      {d.successor.task, d.successor.job + m * ds}};
		const Job_id& tj = r.predecessor.task == target.task ? r.predecessor : r.successor;
		if (m != 0 && !pins(s.job(tj)))
			continue;
		const Job_record& a = s.job(r.predecessor);
		const Job_record& b = s.job(r.successor);
		if (jlds.contains(r) || jlds.contains(Jld{r.successor, r.predecessor}))
			continue;
		// already satisfied, or cannot fit
		if (a.last_end <= b.first_start ||
		    std::max(b.release, a.release + pt.wcet) + st.wcet > b.deadline)
			continue;
		out.push_back(r);
	}
	return out;
}

// All feasible, new children of `node` around `target`. Each child adds one
// candidate dependency; when other jobs of the target task pin the same
// bound, a second child adds the replicated group.
inline std::vector<Search_node> expand(Search_context& ctx, const Search_node& node,
                                       const Schedule& node_schedule, Job_id target,
                                       std::size_t max_children = 0,
                                       const std::function<bool()>& out_of_time = {})
{
	std::vector<Search_node> children;
	const Interval& bounds = node.intervals.at(target.task);
	for (const Jld& d : candidate_jlds(ctx.taskset(), node_schedule, node.jlds, target, max_children,
	                                   &bounds)) {
		if (out_of_time && out_of_time())
			break;
		if (auto child = make_child(ctx, node, {d}, target.task))
			children.push_back(std::move(*child));
		std::vector<Jld> group = replicate(ctx.taskset(), node_schedule, node.jlds, d, target, bounds);
		if (group.size() > 1 && !(out_of_time && out_of_time()))
			if (auto child = make_child(ctx, node, group, target.task))
				children.push_back(std::move(*child));
	}
	heuristic_order(children);
	return children;
}

namespace detail {

// frontier order: more improved chains first, then the heuristic key, then
// creation order
struct Frontier_less
{
	bool operator()(const Search_node& a, const Search_node& b) const
	{
		if (a.eval.score != b.eval.score)
			return a.eval.score < b.eval.score;
		if (preferred(a.key, b.key))
			return false;
		if (preferred(b.key, a.key))
			return true;
		return a.serial > b.serial;
	}
};

// result selection: improved-chain count, then summed relative improvement,
// then the earlier node
inline bool better_result(const Search_node& a, const Search_node& b)
{
	if (a.eval.score != b.eval.score)
		return a.eval.score > b.eval.score;
	if (a.eval.improvement != b.eval.improvement)
		return a.eval.improvement > b.eval.improvement;
	return a.serial < b.serial;
}

} // namespace detail

/*
 * Best-first search over added job-level dependencies.
 *
 * The root is the plain EDF schedule (plus `initial` dependencies). Popping
 * a node expands it on the next job of its target sequence and puts it back
 * with the cursor advanced. The search stops when a node improves every
 * chain or the budget runs out, and otherwise when the frontier is empty.
 * The returned node is the best one seen whose summed relative improvement
 * is not negative and whose chains all stay within their classic LET
 * latencies; otherwise the root.
 */
inline Search_result search(const TaskSet& ts, const Search_options& opt, const Jld_set& initial = {})
{
	using clock = std::chrono::steady_clock;
	const auto started = clock::now();
	auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };
	auto out_of_time = [&] { return opt.budget.seconds && elapsed() >= *opt.budget.seconds; };

	Schedule root_schedule = schedule_edf(ts, initial); // throws if infeasible
	Search_node root;
	root.jlds = initial;
	root.intervals = schedule_aware(root_schedule);
	root.latencies = latencies_of(ts, root.intervals);
	root.key.total_length = root.intervals.total_length();

	Search_context ctx(ts, opt.objective, root.latencies);
	ctx.mark_jlds(root.jlds);
	ctx.mark_schedule(root_schedule);
	root.serial = ctx.next_serial();
	root.eval = evaluate(root.latencies, root.latencies, opt.objective);

	// returned nodes never exceed classic LET latencies on any chain
	const std::vector<Latency_pair> let = latencies_of(ts, classic_let(ts));
	auto admissible = [&](const Search_node& n) {
		if (n.eval.improvement < 0)
			return false;
		for (std::size_t c = 0; c < let.size(); ++c)
			if (n.latencies[c].alpha > let[c].alpha || n.latencies[c].delta > let[c].delta)
				return false;
		return true;
	};

	Search_result res;
	res.root = root;
	res.best = root;
	res.terminated_by = "exhausted";
	const int all = static_cast<int>(ts.chains().size());

	std::priority_queue<Search_node, std::vector<Search_node>, detail::Frontier_less> frontier;
	frontier.push(root);

	bool done = false;
	while (!done) {
		if (all == 0) {
			res.terminated_by = "solution";
			break;
		}
		if ((opt.budget.expansions && res.nodes_expanded >= *opt.budget.expansions) ||
		    out_of_time()) {
			res.terminated_by = "budget";
			break;
		}
		if (frontier.empty())
			break;
		Search_node node = frontier.top();
		frontier.pop();

		Schedule s = schedule_edf(ts, node.jlds);
		std::vector<Job_id> seq = target_sequence(ctx, s, node.intervals, node.target_task);
		if (node.cursor >= seq.size())
			continue;
		const Job_id target = seq[node.cursor];
		++res.nodes_expanded;

		auto children = expand(ctx, node, s, target, opt.max_children, out_of_time);
		if (node.cursor + 1 < seq.size()) {
			node.cursor += 1;
			frontier.push(std::move(node));
		}
		for (Search_node& c : children) {
			const bool ok = admissible(c);
			if (ok && detail::better_result(c, res.best))
				res.best = c;
			if (ok && c.eval.score == all) {
				res.terminated_by = "solution";
				done = true;
			}
			frontier.push(std::move(c));
		}
	}

	res.nodes_evaluated = ctx.evaluated;
	res.best_schedule = schedule_edf(ts, res.best.jlds);
	for (const Jld& d : res.best.jlds)
		if (!initial.contains(d))
			res.added.insert(d);
	res.wall_seconds = elapsed();
	return res;
}

} // namespace letlat

#endif
