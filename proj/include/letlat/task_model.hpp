#ifndef LETLAT_TASK_MODEL_HPP
#define LETLAT_TASK_MODEL_HPP

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "letlat/time.hpp"

namespace letlat {

// Raised for malformed or inconsistent input (cycles, dangling references,
// invalid parameters). Maps to exit code 2 in the CLI.
class Model_error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

struct Task
{
	int id = 0;
	tick_t wcet = 0;
	tick_t period = 0;
	int core = 0;

	double utilization() const
	{
		return static_cast<double>(wcet) / static_cast<double>(period);
	}

	friend bool operator==(const Task&, const Task&) = default;
};

// A shared variable is identified by its writer->reader pair, so every
// variable has exactly one writer.
struct Arc
{
	int writer = 0;
	int reader = 0;

	friend auto operator<=>(const Arc&, const Arc&) = default;
};

inline tick_t hyperperiod(const std::vector<tick_t>& periods)
{
	if (periods.empty())
		throw Model_error("hyperperiod of an empty period set");
	tick_t hp = 1;
	for (tick_t p : periods) {
		if (p <= 0)
			throw Model_error("non-positive period " + std::to_string(p));
		hp = lcm(hp, p);
	}
	return hp;
}

class Comm_dag
{
public:
	Comm_dag() = default;

	Comm_dag(std::vector<int> nodes, std::vector<Arc> arcs)
	: nodes_(std::move(nodes)), arcs_(std::move(arcs))
	{
		std::sort(nodes_.begin(), nodes_.end());
		if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
			throw Model_error("duplicate node in communication graph");
		std::set<Arc> seen;
		for (const Arc& a : arcs_) {
			if (!has_node(a.writer) || !has_node(a.reader))
				throw Model_error("arc " + std::to_string(a.writer) + "->" +
				                  std::to_string(a.reader) + " references an unknown task");
			if (a.writer == a.reader)
				throw Model_error("self-loop on task " + std::to_string(a.writer));
			if (!seen.insert(a).second)
				throw Model_error("duplicate arc " + std::to_string(a.writer) + "->" +
				                  std::to_string(a.reader));
			succ_[a.writer].push_back(a.reader);
			pred_[a.reader].push_back(a.writer);
		}
		for (auto& [_, v] : succ_)
			std::sort(v.begin(), v.end());
		for (auto& [_, v] : pred_)
			std::sort(v.begin(), v.end());
	}

	const std::vector<int>& nodes() const { return nodes_; }
	const std::vector<Arc>& arcs() const { return arcs_; }

	bool has_node(int id) const
	{
		return std::binary_search(nodes_.begin(), nodes_.end(), id);
	}

	bool has_arc(int writer, int reader) const
	{
		const auto& s = successors(writer);
		return std::binary_search(s.begin(), s.end(), reader);
	}

	const std::vector<int>& successors(int id) const
	{
		static const std::vector<int> none;
		auto it = succ_.find(id);
		return it == succ_.end() ? none : it->second;
	}

	const std::vector<int>& predecessors(int id) const
	{
		static const std::vector<int> none;
		auto it = pred_.find(id);
		return it == pred_.end() ? none : it->second;
	}

	// Returns a cycle witness (first node repeated at the end), or an empty
	// vector if the graph is acyclic.
	std::vector<int> find_cycle() const
	{
		enum class Mark { white, grey, black };
		std::map<int, Mark> mark;
		for (int n : nodes_)
			mark[n] = Mark::white;
		std::vector<int> stack;
		std::vector<int> witness;

		auto visit = [&](auto&& self, int n) -> bool {
			mark[n] = Mark::grey;
			stack.push_back(n);
			for (int s : successors(n)) {
				if (mark[s] == Mark::grey) {
					auto from = std::find(stack.begin(), stack.end(), s);
					witness.assign(from, stack.end());
					witness.push_back(s);
					return true;
				}
				if (mark[s] == Mark::white && self(self, s))
					return true;
			}
			stack.pop_back();
			mark[n] = Mark::black;
			return false;
		};

		for (int n : nodes_)
			if (mark[n] == Mark::white && visit(visit, n))
				return witness;
		return {};
	}

private:
	std::vector<int> nodes_;
	std::vector<Arc> arcs_;
	std::map<int, std::vector<int>> succ_;
	std::map<int, std::vector<int>> pred_;
};

inline std::string format_sequence(const std::vector<int>& ids, const char* sep = "->")
{
	std::ostringstream os;
	for (std::size_t i = 0; i < ids.size(); ++i)
		os << (i ? sep : "") << ids[i];
	return os.str();
}

struct Chain
{
	std::vector<int> tasks;
	tick_t hyperperiod = 0;

	std::size_t length() const { return tasks.size(); }
	int first() const { return tasks.front(); }
	int last() const { return tasks.back(); }

	bool contains(int task) const
	{
		return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
	}

	friend bool operator==(const Chain&, const Chain&) = default;
};

// Every source->sink path of the graph with at least two tasks, in
// lexicographic order of the task-id sequence. Hyperperiods are left at
// zero; TaskSet construction fills them in.
inline std::vector<Chain> extract_chains(const Comm_dag& dag)
{
	if (auto cyc = dag.find_cycle(); !cyc.empty())
		throw Model_error("communication graph has a cycle: " + format_sequence(cyc));

	std::vector<Chain> chains;
	std::vector<int> path;
	auto walk = [&](auto&& self, int n) -> void {
		path.push_back(n);
		const auto& succ = dag.successors(n);
		if (succ.empty()) {
			if (path.size() >= 2)
				chains.push_back(Chain{path, 0});
		} else {
			for (int s : succ)
				self(self, s);
		}
		path.pop_back();
	};
	for (int n : dag.nodes())
		if (dag.predecessors(n).empty())
			walk(walk, n);

	std::sort(chains.begin(), chains.end(),
	          [](const Chain& a, const Chain& b) { return a.tasks < b.tasks; });
	return chains;
}

class TaskSet
{
public:
	TaskSet() = default;

	// Validates every cross reference. If `chains` is empty they are
	// derived from the graph.
	TaskSet(std::vector<Task> tasks, std::vector<Arc> arcs, int num_cores,
	        std::vector<std::vector<int>> chains = {}, std::string tick_unit = "tick")
	: tick_unit_(std::move(tick_unit)), num_cores_(num_cores), tasks_(std::move(tasks))
	{
		if (tasks_.empty())
			throw Model_error("task set has no tasks");
		if (num_cores_ <= 0)
			throw Model_error("num_cores must be positive");
		std::sort(tasks_.begin(), tasks_.end(),
		          [](const Task& a, const Task& b) { return a.id < b.id; });
		std::vector<int> ids;
		std::vector<tick_t> periods;
		for (std::size_t i = 0; i < tasks_.size(); ++i) {
			const Task& t = tasks_[i];
			if (t.period <= 0)
				throw Model_error("task " + std::to_string(t.id) + ": period must be positive");
			if (t.wcet <= 0 || t.wcet > t.period)
				throw Model_error("task " + std::to_string(t.id) +
				                  ": wcet must satisfy 0 < wcet <= period");
			if (t.core < 0 || t.core >= num_cores_)
				throw Model_error("task " + std::to_string(t.id) + ": core " +
				                  std::to_string(t.core) + " out of range");
			if (!index_.emplace(t.id, i).second)
				throw Model_error("duplicate task id " + std::to_string(t.id));
			ids.push_back(t.id);
			periods.push_back(t.period);
		}
		hyperperiod_ = letlat::hyperperiod(periods);
		dag_ = Comm_dag(std::move(ids), std::move(arcs));
		if (auto cyc = dag_.find_cycle(); !cyc.empty())
			throw Model_error("communication graph has a cycle: " + format_sequence(cyc));

		if (chains.empty()) {
			chains_ = extract_chains(dag_);
		} else {
			for (auto& seq : chains) {
				if (seq.size() < 2)
					throw Model_error("chain " + format_sequence(seq) + " has fewer than 2 tasks");
				std::vector<int> sorted = seq;
				std::sort(sorted.begin(), sorted.end());
				if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
					throw Model_error("chain " + format_sequence(seq) + " repeats a task");
				for (std::size_t i = 0; i + 1 < seq.size(); ++i)
					if (!dag_.has_arc(seq[i], seq[i + 1]))
						throw Model_error("chain " + format_sequence(seq) + ": no arc " +
						                  std::to_string(seq[i]) + "->" +
						                  std::to_string(seq[i + 1]));
				chains_.push_back(Chain{std::move(seq), 0});
			}
		}
		for (Chain& c : chains_) {
			std::vector<tick_t> ps;
			for (int id : c.tasks)
				ps.push_back(task(id).period);
			c.hyperperiod = letlat::hyperperiod(ps);
		}
	}

	const std::string& tick_unit() const { return tick_unit_; }
	int num_cores() const { return num_cores_; }
	const std::vector<Task>& tasks() const { return tasks_; }
	const Comm_dag& dag() const { return dag_; }
	const std::vector<Chain>& chains() const { return chains_; }
	tick_t hyperperiod() const { return hyperperiod_; }

	bool has_task(int id) const { return index_.count(id) != 0; }

	const Task& task(int id) const
	{
		auto it = index_.find(id);
		if (it == index_.end())
			throw Model_error("unknown task id " + std::to_string(id));
		return tasks_[it->second];
	}

	// position of the task in tasks(), which is sorted by id
	std::size_t index_of(int id) const
	{
		auto it = index_.find(id);
		if (it == index_.end())
			throw Model_error("unknown task id " + std::to_string(id));
		return it->second;
	}

	tick_t jobs_per_hyperperiod(int id) const { return hyperperiod_ / task(id).period; }

	std::vector<double> core_utilization() const
	{
		std::vector<double> u(num_cores_, 0.0);
		for (const Task& t : tasks_)
			u[t.core] += t.utilization();
		return u;
	}

	// Cores whose utilization exceeds 1 cannot be EDF-feasible; reported
	// rather than rejected.
	std::vector<std::string> warnings() const
	{
		std::vector<std::string> w;
		auto u = core_utilization();
		for (int c = 0; c < num_cores_; ++c)
			if (u[c] > 1.0) {
				std::ostringstream os;
				os << "core " << c << " utilization " << u[c] << " exceeds 1";
				w.push_back(os.str());
			}
		return w;
	}

private:
	std::string tick_unit_ = "tick";
	int num_cores_ = 1;
	std::vector<Task> tasks_;
	Comm_dag dag_;
	std::vector<Chain> chains_;
	tick_t hyperperiod_ = 0;
	std::map<int, std::size_t> index_;
};

// Worst-fit decreasing by utilization: heaviest task first, onto the least
// loaded core. Ties go to the lower core index.
inline void partition_worst_fit(std::vector<Task>& tasks, int num_cores)
{
	std::vector<std::size_t> order(tasks.size());
	for (std::size_t i = 0; i < order.size(); ++i)
		order[i] = i;
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		// compare C_a/T_a > C_b/T_b exactly
		return tasks[a].wcet * tasks[b].period > tasks[b].wcet * tasks[a].period;
	});
	std::vector<double> load(num_cores, 0.0);
	for (std::size_t i : order) {
		int best = 0;
		for (int c = 1; c < num_cores; ++c)
			if (load[c] < load[best])
				best = c;
		tasks[i].core = best;
		load[best] += tasks[i].utilization();
	}
}

} // namespace letlat

#endif
