#ifndef LETLAT_SIM_ORACLE_HPP
#define LETLAT_SIM_ORACLE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "letlat/intervals.hpp"
#include "letlat/task_model.hpp"

namespace letlat {

// Zero-time LET read/write simulation with per-chain provenance. It shares
// nothing with chain_analysis beyond the input types.

class Measurement_error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

// input timestamp at the chain head; nullopt is the initial default value
using Provenance = std::optional<tick_t>;

enum class Access { write = 0, read = 1 };

struct Trace_event
{
	tick_t tick = 0;
	Access kind = Access::read;
	int task = 0;
	tick_t job = 0;

	friend bool operator==(const Trace_event&, const Trace_event&) = default;
};

struct Chain_output
{
	std::size_t chain = 0;
	tick_t tick = 0;
	Provenance input;

	friend bool operator==(const Chain_output&, const Chain_output&) = default;
};

struct Trace
{
	tick_t hyperperiod = 0;
	tick_t horizon = 0;
	// sorted by tick; writes before reads at equal ticks
	std::vector<Trace_event> events;
	// sorted by tick
	std::vector<Chain_output> outputs;
	// per chain: every read of the head task, i.e. every injected input
	std::vector<std::vector<tick_t>> inputs;
};

// Shared variables, one per arc. Each holds, for every chain routed through
// the arc, the provenance of the value last written.
class Var_store
{
public:
	Provenance get(const Arc& a, std::size_t chain) const
	{
		auto it = vars_.find(a);
		if (it == vars_.end())
			return std::nullopt;
		auto jt = it->second.find(chain);
		return jt == it->second.end() ? std::nullopt : jt->second;
	}

	void set(const Arc& a, std::size_t chain, Provenance p) { vars_[a][chain] = p; }

private:
	std::map<Arc, std::map<std::size_t, Provenance>> vars_;
};

inline Trace simulate(const TaskSet& ts, const Interval_assignment& intervals, tick_t horizon)
{
	if (horizon <= 0 || horizon % ts.hyperperiod() != 0)
		throw Model_error("simulation horizon must be a positive multiple of the hyperperiod");
	validate(ts, intervals);

	Trace tr;
	tr.hyperperiod = ts.hyperperiod();
	tr.horizon = horizon;
	tr.inputs.resize(ts.chains().size());

	for (const Task& t : ts.tasks()) {
		const Interval& iv = intervals.at(t.id);
		for (tick_t k = 0; k * t.period < horizon; ++k) {
			tr.events.push_back(Trace_event{k * t.period + iv.begin, Access::read, t.id, k});
			tr.events.push_back(Trace_event{k * t.period + iv.end, Access::write, t.id, k});
		}
	}
	std::sort(tr.events.begin(), tr.events.end(), [](const Trace_event& a, const Trace_event& b) {
		if (a.tick != b.tick)
			return a.tick < b.tick;
		if (a.kind != b.kind)
			return a.kind < b.kind;
		if (a.task != b.task)
			return a.task < b.task;
		return a.job < b.job;
	});

	// where each task sits in each chain
	struct Role
	{
		std::size_t chain;
		std::size_t pos;
	};
	std::map<int, std::vector<Role>> roles;
	for (std::size_t c = 0; c < ts.chains().size(); ++c) {
		const Chain& ch = ts.chains()[c];
		for (std::size_t p = 0; p < ch.length(); ++p)
			roles[ch.tasks[p]].push_back(Role{c, p});
	}

	Var_store store;
	// local copy of the last job of each task, per chain (end <= T, so jobs of
	// one task never overlap)
	std::map<std::pair<int, std::size_t>, Provenance> local;

	for (const Trace_event& e : tr.events) {
		auto rit = roles.find(e.task);
		if (rit == roles.end())
			continue;
		for (const Role& r : rit->second) {
			const Chain& ch = ts.chains()[r.chain];
			if (e.kind == Access::read) {
				Provenance p;
				if (r.pos == 0) {
					p = e.tick;
					tr.inputs[r.chain].push_back(e.tick);
				} else {
					p = store.get(Arc{ch.tasks[r.pos - 1], e.task}, r.chain);
				}
				local[{e.task, r.chain}] = p;
			} else {
				Provenance p = local[{e.task, r.chain}];
				if (r.pos + 1 < ch.length())
					store.set(Arc{e.task, ch.tasks[r.pos + 1]}, r.chain, p);
				else
					tr.outputs.push_back(Chain_output{r.chain, e.tick, p});
			}
		}
	}
	return tr;
}

struct Input_latency
{
	tick_t input = 0;
	std::optional<tick_t> reaction; // nullopt: overwritten before reaching the output
	std::optional<tick_t> age;
};

struct Empirical_latencies
{
	std::vector<Input_latency> per_input;
	tick_t worst_reaction = 0;
	tick_t worst_age = 0;
	std::size_t propagated = 0;
};

// Reaction = first output carrying the input minus the input instant, age =
// last such output minus the input instant, for inputs injected in
// [window_begin, window_end). An input's last output is only known once an
// output carrying a later input has been seen.
inline Empirical_latencies empirical_latencies(const Trace& tr, std::size_t chain,
                                               tick_t window_begin, tick_t window_end)
{
	std::map<tick_t, std::pair<tick_t, tick_t>> seen; // input -> first, last output
	tick_t newest = -1;
	bool any = false;
	for (const Chain_output& o : tr.outputs) {
		if (o.chain != chain || !o.input)
			continue;
		auto [it, fresh] = seen.try_emplace(*o.input, o.tick, o.tick);
		if (!fresh)
			it->second.second = o.tick;
		newest = any ? std::max(newest, *o.input) : *o.input;
		any = true;
	}

	Empirical_latencies out;
	for (tick_t x : tr.inputs.at(chain)) {
		if (x < window_begin || x >= window_end)
			continue;
		if (!any || newest <= x)
			throw Measurement_error("trace too short: input at " + std::to_string(x) +
			                        " not resolved by horizon " + std::to_string(tr.horizon));
		Input_latency il{x, std::nullopt, std::nullopt};
		if (auto it = seen.find(x); it != seen.end()) {
			il.reaction = it->second.first - x;
			il.age = it->second.second - x;
			out.worst_reaction = std::max(out.worst_reaction, *il.reaction);
			out.worst_age = std::max(out.worst_age, *il.age);
			++out.propagated;
		}
		out.per_input.push_back(il);
	}
	if (out.propagated == 0)
		throw Measurement_error("no input in the measurement window reached the chain output");
	return out;
}

// Inputs of the second hyperperiod, clear of the start-up phase.
inline Empirical_latencies empirical_latencies(const Trace& tr, std::size_t chain)
{
	return empirical_latencies(tr, chain, tr.hyperperiod, 2 * tr.hyperperiod);
}

// Simulates with a growing horizon (starting at `min_hyperperiods`) until
// every chain can be measured.
inline std::vector<Empirical_latencies> measure_all(const TaskSet& ts, const Interval_assignment& a,
                                                    tick_t min_hyperperiods = 3,
                                                    tick_t max_hyperperiods = 64)
{
	for (tick_t h = min_hyperperiods;; h *= 2) {
		h = std::min(h, max_hyperperiods);
		Trace tr = simulate(ts, a, h * ts.hyperperiod());
		try {
			std::vector<Empirical_latencies> out;
			for (std::size_t c = 0; c < ts.chains().size(); ++c)
				out.push_back(empirical_latencies(tr, c));
			return out;
		} catch (const Measurement_error&) {
			if (h >= max_hyperperiods)
				throw;
		}
	}
}

} // namespace letlat

#endif
