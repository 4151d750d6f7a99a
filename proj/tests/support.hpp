#ifndef LETLAT_TEST_SUPPORT_HPP
#define LETLAT_TEST_SUPPORT_HPP

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "letlat/schedule.hpp"
#include "letlat/task_model.hpp"

namespace letlat::test {

// tau1:(1,3), tau2:(1,5), tau3:(1,3) on one core, chain 1->2->3
inline TaskSet running_example()
{
	return TaskSet({{1, 1, 3, 0}, {2, 1, 5, 0}, {3, 1, 3, 0}}, {{1, 2}, {2, 3}}, 1, {{1, 2, 3}}, "1ms");
}

// tau2,0 < tau1,0; tau1,0 < tau3,0; tau2,2 < tau3,3
inline Jld_set running_example_jlds()
{
	Jld_set s;
	s.insert(Jld{{2, 0}, {1, 0}});
	s.insert(Jld{{1, 0}, {3, 0}});
	s.insert(Jld{{2, 2}, {3, 3}});
	return s;
}

// Small random sets: 2 cores, 2..12 tasks, periods from {2,3,4,5,6,10},
// 1..4 chains of 2..4 tasks along a random rank, EDF-feasible per core.
inline TaskSet small_random_set(std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
	static const tick_t periods[] = {2, 3, 4, 5, 6, 10};
	const tick_t h = 60;

	const int want_tasks = pick(2, 12);
	std::vector<Task> tasks;
	tick_t demand[2] = {0, 0};
	// place each task on a random core; switch cores, then shrink, then drop
	// it when it does not fit
	for (int i = 0; i < want_tasks; ++i) {
		const tick_t t = periods[pick(0, 5)];
		tick_t c = pick(1, static_cast<int>(t));
		int core = pick(0, 1);
		while (demand[core] + c * (h / t) > h) {
			if (demand[1 - core] + c * (h / t) <= h)
				core = 1 - core;
			else if (c > 1)
				--c;
			else
				break;
		}
		if (demand[core] + c * (h / t) > h)
			continue;
		demand[core] += c * (h / t);
		tasks.push_back(Task{static_cast<int>(tasks.size()) + 1, c, t, core});
	}
	const int n = static_cast<int>(tasks.size());

	std::vector<int> rank(n);
	for (int i = 0; i < n; ++i)
		rank[i] = i + 1;
	std::shuffle(rank.begin(), rank.end(), rng);

	std::set<std::vector<int>> chains;
	const int want = pick(1, 4);
	for (int attempt = 0; attempt < 50 && static_cast<int>(chains.size()) < want; ++attempt) {
		int len = std::min(n, pick(2, 4));
		std::vector<int> pos(n);
		for (int i = 0; i < n; ++i)
			pos[i] = i;
		std::shuffle(pos.begin(), pos.end(), rng);
		pos.resize(len);
		std::sort(pos.begin(), pos.end());
		std::vector<int> chain;
		for (int p : pos)
			chain.push_back(rank[p]);
		chains.insert(chain);
	}
	std::set<Arc> arcs;
	for (const auto& c : chains)
		for (std::size_t i = 0; i + 1 < c.size(); ++i)
			arcs.insert(Arc{c[i], c[i + 1]});
	return TaskSet(tasks, {arcs.begin(), arcs.end()}, 2, {chains.begin(), chains.end()});
}

} // namespace letlat::test

#endif
