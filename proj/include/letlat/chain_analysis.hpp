#ifndef LETLAT_CHAIN_ANALYSIS_HPP
#define LETLAT_CHAIN_ANALYSIS_HPP

#include <algorithm>
#include <cassert>
#include <vector>

#include "letlat/intervals.hpp"
#include "letlat/task_model.hpp"

namespace letlat {

// One writer->reader pair of a chain with the communication intervals both
// sides use.
struct Comm_pair
{
	tick_t writer_period = 0;
	Interval writer;
	tick_t reader_period = 0;
	Interval reader;

	static Comm_pair of(const TaskSet& ts, const Interval_assignment& a, int w, int r)
	{
		return Comm_pair{ts.task(w).period, a.at(w), ts.task(r).period, a.at(r)};
	}

	// distance from a write to the writer's next release
	tick_t writer_slack() const { return writer_period - writer.end; }
};

/*
 * Publishing point n of a pair: the last write of the writer that the
 * reader's next read picks up.
 *
 *   T_W <= T_R: one publishing point per read of the reader,
 *     P(n) = floor((n T_R + begin_R + (T_W - end_W)) / T_W) T_W - (T_W - end_W)
 *   T_W >= T_R: one publishing point per write of the writer,
 *     P(n) = n T_W - (T_W - end_W)
 *
 * Both branches agree when T_W == T_R. A negative result (only possible for
 * n == 0) lies before the first release and is ignored by callers.
 */
inline tick_t publishing_point(const Comm_pair& p, tick_t n)
{
	const tick_t tw = p.writer_period;
	const tick_t tr = p.reader_period;
	const tick_t slack = p.writer_slack();
	if (tw <= tr)
		return floor_div(n * tr + p.reader.begin + slack, tw) * tw - slack;
	return n * tw - slack;
}

// Reading point n: the first read of the data published at P(n).
inline tick_t reading_point(const Comm_pair& p, tick_t n)
{
	const tick_t tw = p.writer_period;
	const tick_t tr = p.reader_period;
	if (tw <= tr)
		return n * tr + p.reader.begin;
	return ceil_div(n * tw - p.writer_slack() - p.reader.begin, tr) * tr + p.reader.begin;
}

namespace detail {

// last write of a task at or before t (writes at k T + end)
inline tick_t last_write_at_or_before(tick_t period, const Interval& iv, tick_t t)
{
	return floor_div(t - iv.end, period) * period + iv.end;
}

} // namespace detail

struct Path_point
{
	tick_t publish = 0; // write of the pair's writer
	tick_t read = 0;    // read by the job of the reader that forwards the data

	friend bool operator==(const Path_point&, const Path_point&) = default;
};

struct Basic_path
{
	std::size_t chain = 0;
	tick_t n = 0;
	// one entry per consecutive pair, first pair first
	std::vector<Path_point> points;
	tick_t input = 0; // read of the chain's first task that starts the path
	tick_t theta = 0;
	tick_t phi = 0;
	tick_t alpha = 0;
	tick_t delta = 0;

	tick_t first_publish() const { return points.front().publish; }
	tick_t last_read() const { return points.back().read; }

	friend bool operator==(const Basic_path&, const Basic_path&) = default;
};

// Data age of one basic path:
//   (end_1 - begin_1) + theta + phi - begin_e - (T_e - end_e)
inline tick_t data_age(const TaskSet& ts, const Chain& chain, const Basic_path& path,
                       const Interval_assignment& a)
{
	const Interval& head = a.at(chain.first());
	const Interval& tail = a.at(chain.last());
	const tick_t tail_period = ts.task(chain.last()).period;
	return head.length() + path.theta + path.phi - tail.begin - (tail_period - tail.end);
}

// Reaction latency of one basic path:
//   (end_1 - begin_1) + theta + (end_e - begin_e)
inline tick_t reaction_latency(const TaskSet& ts, const Chain& chain, const Basic_path& path,
                               const Interval_assignment& a)
{
	(void)ts;
	return a.at(chain.first()).length() + path.theta + a.at(chain.last()).length();
}

/*
 * Basic paths of a chain over one chain hyperperiod, in steady state.
 *
 * The terminal reading points are those of the last pair for the indices
 * covering one HP_E, starting at the first index whose points are not
 * negative. From each of them the path is traced backwards: the reader of
 * pair j reads at some instant, the data it sees was published by the last
 * write of the writer at or before that instant, and that writer job read at
 * its own release + begin. Writes before t = 0 are allowed in this walk since
 * the pattern repeats every HP_E.
 *
 * A terminal reading point whose first publishing point equals that of the
 * preceding terminal reading point carries the same input and is dropped.
 * phi uses the next kept terminal reading point, which for the last path in
 * the window is the first kept one shifted by HP_E.
 */
inline std::vector<Basic_path> enumerate_basic_paths(const TaskSet& ts, std::size_t chain_index,
                                                     const Interval_assignment& a)
{
	const Chain& chain = ts.chains().at(chain_index);
	const std::size_t pairs = chain.length() - 1;
	const Comm_pair last =
	    Comm_pair::of(ts, a, chain.tasks[pairs - 1], chain.tasks[pairs]);

	const tick_t step = std::max(last.writer_period, last.reader_period);
	const tick_t count = chain.hyperperiod / step;
	const tick_t n0 = (publishing_point(last, 0) < 0 || reading_point(last, 0) < 0) ? 1 : 0;

	auto trace = [&](tick_t n) {
		Basic_path bp;
		bp.chain = chain_index;
		bp.n = n;
		bp.points.resize(pairs);
		tick_t q = reading_point(last, n);
		tick_t p = publishing_point(last, n);
		assert(p == detail::last_write_at_or_before(last.writer_period, last.writer, q));
		bp.points[pairs - 1] = Path_point{p, q};
		tick_t r = p - last.writer.end + last.writer.begin;
		for (std::size_t j = pairs - 1; j-- > 0;) {
			const int w = chain.tasks[j];
			const Interval& iw = a.at(w);
			const tick_t tw = ts.task(w).period;
			tick_t pub = detail::last_write_at_or_before(tw, iw, r);
			bp.points[j] = Path_point{pub, r};
			r = pub - iw.end + iw.begin;
		}
		bp.input = r;
		bp.theta = bp.last_read() - bp.first_publish();
		return bp;
	};

	// n0 - 1 decides whether n0 is a duplicate; the extra HP_E of candidates
	// supplies the successor of the last kept path.
	std::vector<Basic_path> candidates;
	for (tick_t n = n0 - 1; n <= n0 + 2 * count; ++n)
		candidates.push_back(trace(n));

	std::vector<bool> kept(candidates.size(), false);
	for (std::size_t i = 1; i < candidates.size(); ++i)
		kept[i] = candidates[i].first_publish() != candidates[i - 1].first_publish();

	std::vector<Basic_path> paths;
	for (std::size_t i = 1; i <= static_cast<std::size_t>(count); ++i) {
		if (!kept[i])
			continue;
		std::size_t next = i + 1;
		while (!kept[next])
			++next;
		Basic_path bp = candidates[i];
		bp.phi = candidates[next].last_read() - bp.last_read();
		bp.alpha = data_age(ts, chain, bp, a);
		bp.delta = reaction_latency(ts, chain, bp, a);
		paths.push_back(std::move(bp));
	}
	return paths;
}

struct Chain_latencies
{
	std::size_t chain = 0;
	Interval_model model = Interval_model::let;
	tick_t alpha = 0;
	tick_t delta = 0;
	std::vector<Basic_path> paths;
};

inline Chain_latencies worst_case(const TaskSet& ts, std::size_t chain_index,
                                  const Interval_assignment& a)
{
	Chain_latencies out{chain_index, a.model, 0, 0, enumerate_basic_paths(ts, chain_index, a)};
	for (const Basic_path& bp : out.paths) {
		out.alpha = std::max(out.alpha, bp.alpha);
		out.delta = std::max(out.delta, bp.delta);
	}
	return out;
}

inline std::vector<Chain_latencies> analyze(const TaskSet& ts, const Interval_assignment& a)
{
	std::vector<Chain_latencies> out;
	out.reserve(ts.chains().size());
	for (std::size_t c = 0; c < ts.chains().size(); ++c)
		out.push_back(worst_case(ts, c, a));
	return out;
}

} // namespace letlat

#endif
