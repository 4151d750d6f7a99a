#ifndef LETLAT_BENCHGEN_HPP
#define LETLAT_BENCHGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "letlat/task_model.hpp"

namespace letlat {

class Generation_error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

struct Period_weight
{
	double period_ms = 0;
	double weight = 0;
};

struct Gen_profile
{
	std::string name = "custom";
	std::vector<Period_weight> periods;
	int num_cores = 2;
	double utilization_per_core = 0.83;
	int min_tasks = 80;
	int max_tasks = 100;
	// chain count is drawn uniformly from [min_chains, max_chains]
	int min_chains = 32;
	int max_chains = 48;
	int min_chain_length = 2;
	int max_chain_length = 5;
	int max_distinct_periods = 3;
	double single_rate_probability = 0.7;
	tick_t ticks_per_ms = 100;
	std::uint64_t seed = 1;

	double chains_target() const { return 0.5 * (min_chains + max_chains); }
};

// Period shares of the automotive benchmark (1, 2, 5, 10, 20, 50, 100, 200,
// 1000 ms). Angle-synchronous tasks are left out, so they sum to 0.85;
// weights are normalized before use.
inline Gen_profile automotive_profile()
{
	Gen_profile p;
	p.name = "automotive";
	p.periods = {{1, 0.03},  {2, 0.02},  {5, 0.02},   {10, 0.25}, {20, 0.25},
	             {50, 0.03}, {100, 0.20}, {200, 0.01}, {1000, 0.04}};
	return p;
}

// Fewer, heavier tasks, up to five periods per chain and few single-rate
// chains.
inline Gen_profile synthetic_profile()
{
	Gen_profile p = automotive_profile();
	p.name = "synthetic";
	p.utilization_per_core = 0.76;
	p.min_tasks = 30;
	p.max_tasks = 50;
	p.min_chains = 15;
	p.max_chains = 25;
	p.max_distinct_periods = 5;
	p.single_rate_probability = 0.1;
	return p;
}

inline Gen_profile profile_by_name(const std::string& name)
{
	if (name == "automotive")
		return automotive_profile();
	if (name == "synthetic")
		return synthetic_profile();
	throw Model_error("unknown profile '" + name + "'");
}

inline void validate(const Gen_profile& p)
{
	auto fail = [&](const std::string& why) { throw Model_error("profile " + p.name + ": " + why); };
	if (p.periods.empty())
		fail("no periods");
	for (const Period_weight& pw : p.periods) {
		if (!(pw.weight > 0))
			fail("period weights must be positive");
		double ticks = pw.period_ms * static_cast<double>(p.ticks_per_ms);
		if (ticks < 1 || std::abs(ticks - std::round(ticks)) > 1e-9)
			fail("period " + std::to_string(pw.period_ms) + " ms is not a whole number of ticks");
	}
	if (p.num_cores < 1)
		fail("num_cores must be >= 1");
	if (!(p.utilization_per_core > 0 && p.utilization_per_core <= 1))
		fail("utilization_per_core must be in (0, 1]");
	if (p.min_tasks < 1 || p.min_tasks > p.max_tasks)
		fail("bad task count range");
	if (p.min_chains < 0 || p.min_chains > p.max_chains)
		fail("bad chain count range");
	if (p.min_chain_length < 2 || p.min_chain_length > p.max_chain_length)
		fail("chain length range must satisfy 2 <= min <= max");
	if (p.max_distinct_periods < 1)
		fail("max_distinct_periods must be >= 1");
	if (!(p.single_rate_probability >= 0 && p.single_rate_probability <= 1))
		fail("single_rate_probability must be in [0, 1]");
	if (p.ticks_per_ms < 1)
		fail("ticks_per_ms must be >= 1");
}

inline std::vector<double> normalized_weights(const Gen_profile& p)
{
	double sum = 0;
	for (const Period_weight& pw : p.periods)
		sum += pw.weight;
	std::vector<double> w;
	for (const Period_weight& pw : p.periods)
		w.push_back(pw.weight / sum);
	return w;
}

inline nlohmann::ordered_json to_json(const Gen_profile& p)
{
	nlohmann::ordered_json periods = nlohmann::ordered_json::array();
	for (const Period_weight& pw : p.periods)
		periods.push_back({{"period_ms", pw.period_ms}, {"weight", pw.weight}});
	return {{"name", p.name},
	        {"periods", periods},
	        {"num_cores", p.num_cores},
	        {"utilization_per_core", p.utilization_per_core},
	        {"min_tasks", p.min_tasks},
	        {"max_tasks", p.max_tasks},
	        {"min_chains", p.min_chains},
	        {"max_chains", p.max_chains},
	        {"min_chain_length", p.min_chain_length},
	        {"max_chain_length", p.max_chain_length},
	        {"max_distinct_periods", p.max_distinct_periods},
	        {"single_rate_probability", p.single_rate_probability},
	        {"ticks_per_ms", p.ticks_per_ms},
	        {"seed", p.seed}};
}

// Missing keys keep the values of `base`.
inline Gen_profile profile_from_json(const nlohmann::ordered_json& j, Gen_profile base = {})
{
	try {
		Gen_profile p = std::move(base);
		p.name = j.value("name", p.name);
		if (j.contains("periods")) {
			p.periods.clear();
			for (const auto& e : j.at("periods"))
				p.periods.push_back({e.at("period_ms").get<double>(), e.at("weight").get<double>()});
		}
		p.num_cores = j.value("num_cores", p.num_cores);
		p.utilization_per_core = j.value("utilization_per_core", p.utilization_per_core);
		p.min_tasks = j.value("min_tasks", p.min_tasks);
		p.max_tasks = j.value("max_tasks", p.max_tasks);
		p.min_chains = j.value("min_chains", p.min_chains);
		p.max_chains = j.value("max_chains", p.max_chains);
		p.min_chain_length = j.value("min_chain_length", p.min_chain_length);
		p.max_chain_length = j.value("max_chain_length", p.max_chain_length);
		p.max_distinct_periods = j.value("max_distinct_periods", p.max_distinct_periods);
		p.single_rate_probability = j.value("single_rate_probability", p.single_rate_probability);
		p.ticks_per_ms = j.value("ticks_per_ms", p.ticks_per_ms);
		p.seed = j.value("seed", p.seed);
		return p;
	} catch (const nlohmann::ordered_json::exception& e) {
		throw Model_error(std::string("profile: ") + e.what());
	}
}

// UUniFast: n utilizations summing to `total`, uniformly distributed over
// the simplex. Draws with any share above `cap` are discarded and redrawn.
template <class Rng>
std::vector<double> uunifast_discard(Rng& rng, int n, double total, double cap = 1.0,
                                     int max_attempts = 1000)
{
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (int attempt = 0; attempt < max_attempts; ++attempt) {
		std::vector<double> u(n);
		double sum = total;
		for (int i = 0; i < n - 1; ++i) {
			double next = sum * std::pow(unit(rng), 1.0 / static_cast<double>(n - 1 - i));
			u[i] = sum - next;
			sum = next;
		}
		u[n - 1] = sum;
		if (std::all_of(u.begin(), u.end(), [&](double x) { return x <= cap; }))
			return u;
	}
	throw Generation_error("UUniFast could not keep every share below " + std::to_string(cap));
}

namespace detail {

inline std::string tick_unit_label(tick_t ticks_per_ms)
{
	if (ticks_per_ms == 1)
		return "1ms";
	if (1000 % ticks_per_ms == 0)
		return std::to_string(1000 / ticks_per_ms) + "us";
	return "1/" + std::to_string(ticks_per_ms) + "ms";
}

// exact per-core EDF test for implicit deadlines: sum C_i * (H / T_i) <= H
inline bool edf_utilization_ok(const std::vector<Task>& tasks, int num_cores)
{
	std::vector<tick_t> periods;
	for (const Task& t : tasks)
		periods.push_back(t.period);
	tick_t h = hyperperiod(periods);
	std::vector<tick_t> demand(num_cores, 0);
	for (const Task& t : tasks)
		demand[t.core] += t.wcet * (h / t.period);
	return std::all_of(demand.begin(), demand.end(), [&](tick_t d) { return d <= h; });
}

} // namespace detail

/*
 * Draws one task set from the profile, deterministic in profile.seed.
 *
 * Periods follow the normalized profile weights. Utilizations come from
 * UUniFast over num_cores * utilization_per_core and WCETs are rounded up to
 * whole ticks (at least one). Tasks are mapped worst-fit decreasing. Each
 * chain is either single-rate or uses between two and max_distinct_periods
 * periods; tasks along a chain follow a random global rank, and the union of
 * all chains is acyclic. Sets that fail the EDF test are redrawn.
 */
inline TaskSet gen_taskset(const Gen_profile& p, int max_attempts = 200)
{
	validate(p);
	std::mt19937_64 rng(p.seed);
	const std::vector<double> weights = normalized_weights(p);
	std::vector<tick_t> period_ticks;
	for (const Period_weight& pw : p.periods)
		period_ticks.push_back(std::llround(pw.period_ms * static_cast<double>(p.ticks_per_ms)));

	for (int attempt = 0; attempt < max_attempts; ++attempt) {
		const int n = std::uniform_int_distribution<int>(p.min_tasks, p.max_tasks)(rng);
		std::discrete_distribution<std::size_t> pick_period(weights.begin(), weights.end());
		std::vector<std::size_t> period_of(n);
		for (int i = 0; i < n; ++i)
			period_of[i] = pick_period(rng);

		std::vector<double> u =
		    uunifast_discard(rng, n, p.utilization_per_core * p.num_cores, 1.0);
		std::vector<Task> tasks;
		for (int i = 0; i < n; ++i) {
			tick_t t = period_ticks[period_of[i]];
			tick_t c = std::max<tick_t>(1, static_cast<tick_t>(std::ceil(u[i] * static_cast<double>(t) - 1e-9)));
			tasks.push_back(Task{i + 1, std::min(c, t), t, 0});
		}
		partition_worst_fit(tasks, p.num_cores);
		if (!detail::edf_utilization_ok(tasks, p.num_cores))
			continue;

		// tasks grouped by period index
		std::map<std::size_t, std::vector<int>> by_period;
		for (int i = 0; i < n; ++i)
			by_period[period_of[i]].push_back(i + 1);

		std::vector<int> rank(n + 1);
		for (int i = 0; i <= n; ++i)
			rank[i] = i;
		std::shuffle(rank.begin() + 1, rank.end(), rng);

		const int want = std::uniform_int_distribution<int>(p.min_chains, p.max_chains)(rng);
		std::set<std::vector<int>> chains;
		std::set<Arc> arcs;
		std::bernoulli_distribution single(p.single_rate_probability);

		auto sample = [&](const std::vector<int>& pool, std::size_t k) {
			std::vector<int> v = pool;
			std::shuffle(v.begin(), v.end(), rng);
			v.resize(k);
			return v;
		};

		int tries = 0;
		while (static_cast<int>(chains.size()) < want && tries++ < 200 * (want + 1)) {
			const int len = std::uniform_int_distribution<int>(
			    p.min_chain_length, std::min(p.max_chain_length, n))(rng);
			if (len < p.min_chain_length)
				break;
			std::vector<int> members;
			if (p.max_distinct_periods == 1 || single(rng)) {
				std::vector<std::size_t> eligible;
				for (const auto& [pi, ids] : by_period)
					if (static_cast<int>(ids.size()) >= len)
						eligible.push_back(pi);
				if (eligible.empty())
					continue;
				std::size_t pi = eligible[std::uniform_int_distribution<std::size_t>(
				    0, eligible.size() - 1)(rng)];
				members = sample(by_period[pi], len);
			} else {
				std::vector<std::size_t> present;
				for (const auto& [pi, ids] : by_period)
					present.push_back(pi);
				const int dmax = std::min({p.max_distinct_periods, len, static_cast<int>(present.size())});
				if (dmax < 2)
					continue;
				const int d = std::uniform_int_distribution<int>(2, dmax)(rng);
				std::vector<std::size_t> chosen(present.begin(), present.end());
				std::shuffle(chosen.begin(), chosen.end(), rng);
				chosen.resize(d);
				std::map<std::size_t, int> need;
				for (std::size_t pi : chosen)
					need[pi] = 1;
				for (int extra = d; extra < len; ++extra)
					++need[chosen[std::uniform_int_distribution<int>(0, d - 1)(rng)]];
				bool ok = true;
				for (const auto& [pi, k] : need)
					if (static_cast<int>(by_period[pi].size()) < k)
						ok = false;
				if (!ok)
					continue;
				for (const auto& [pi, k] : need) {
					auto part = sample(by_period[pi], k);
					members.insert(members.end(), part.begin(), part.end());
				}
			}
			std::sort(members.begin(), members.end(),
			          [&](int a, int b) { return rank[a] < rank[b]; });
			if (!chains.insert(members).second)
				continue;
			for (std::size_t i = 0; i + 1 < members.size(); ++i)
				arcs.insert(Arc{members[i], members[i + 1]});
		}
		if (static_cast<int>(chains.size()) < want)
			continue;

		// keep the draw order out of the output: chains sorted lexicographically
		std::vector<std::vector<int>> chain_list(chains.begin(), chains.end());
		return TaskSet(std::move(tasks), std::vector<Arc>(arcs.begin(), arcs.end()), p.num_cores,
		               std::move(chain_list), detail::tick_unit_label(p.ticks_per_ms));
	}
	throw Generation_error("profile " + p.name + " unsatisfiable after " +
	                       std::to_string(max_attempts) + " attempts");
}

} // namespace letlat

#endif
