#ifndef LETLAT_COMPARE_HPP
#define LETLAT_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "letlat/io.hpp"

// Aggregation of per-set analysis reports into latencies normalized by the
// classic LET value of the same chain.

namespace letlat {

struct Summary
{
	double min = 0;
	double q25 = 0;
	double mean = 0;
	double q75 = 0;
	double max = 0;
	std::size_t count = 0;
};

// Quantile by linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q)
{
	if (xs.empty())
		return 0.0;
	std::sort(xs.begin(), xs.end());
	const double pos = q * static_cast<double>(xs.size() - 1);
	const auto lo = static_cast<std::size_t>(std::floor(pos));
	const auto hi = static_cast<std::size_t>(std::ceil(pos));
	return xs[lo] + (xs[hi] - xs[lo]) * (pos - static_cast<double>(lo));
}

inline Summary summarize(const std::vector<double>& xs)
{
	Summary s;
	s.count = xs.size();
	if (xs.empty())
		return s;
	s.min = *std::min_element(xs.begin(), xs.end());
	s.max = *std::max_element(xs.begin(), xs.end());
	s.q25 = quantile(xs, 0.25);
	s.q75 = quantile(xs, 0.75);
	double sum = 0;
	for (double x : xs)
		sum += x;
	s.mean = sum / static_cast<double>(xs.size());
	return s;
}

struct Normalized_chain
{
	std::string taskset;
	std::size_t chain = 0;
	std::string model;
	tick_t alpha = 0;
	tick_t delta = 0;
	double norm_alpha = 0;
	double norm_delta = 0;
};

struct Comparison
{
	std::vector<Normalized_chain> chains; // taskset, model, chain order
	std::map<std::string, Summary> alpha; // per model
	std::map<std::string, Summary> delta;
	std::vector<std::string> skipped;     // task sets without a let report
};

// `reports` are analysis report documents (io::report_json). Every model
// other than let is normalized against the let report of the same task set.
inline Comparison compare_reports(const std::vector<io::json>& reports)
{
	// taskset -> model -> report
	std::map<std::string, std::map<std::string, const io::json*>> by_set;
	for (const io::json& r : reports) {
		try {
			by_set[r.at("taskset").get<std::string>()][r.at("model").get<std::string>()] = &r;
		} catch (const io::json::exception& e) {
			throw Model_error(std::string("report: ") + e.what());
		}
	}

	Comparison out;
	std::map<std::string, std::vector<double>> alphas, deltas;
	for (const auto& [set, models] : by_set) {
		auto let_it = models.find("let");
		if (let_it == models.end()) {
			out.skipped.push_back(set);
			continue;
		}
		const io::json& let_chains = let_it->second->at("chains");
		for (const auto& [model, rep] : models) {
			const io::json& chains = rep->at("chains");
			if (chains.size() != let_chains.size())
				throw Model_error("report " + set + "/" + model + " has " +
				                  std::to_string(chains.size()) + " chains, let has " +
				                  std::to_string(let_chains.size()));
			for (std::size_t c = 0; c < chains.size(); ++c) {
				Normalized_chain n;
				n.taskset = set;
				n.chain = c;
				n.model = model;
				n.alpha = chains[c].at("alpha").get<tick_t>();
				n.delta = chains[c].at("delta").get<tick_t>();
				const auto la = let_chains[c].at("alpha").get<tick_t>();
				const auto ld = let_chains[c].at("delta").get<tick_t>();
				n.norm_alpha = la > 0 ? static_cast<double>(n.alpha) / static_cast<double>(la) : 1.0;
				n.norm_delta = ld > 0 ? static_cast<double>(n.delta) / static_cast<double>(ld) : 1.0;
				alphas[model].push_back(n.norm_alpha);
				deltas[model].push_back(n.norm_delta);
				out.chains.push_back(std::move(n));
			}
		}
	}
	for (const auto& [model, xs] : alphas)
		out.alpha[model] = summarize(xs);
	for (const auto& [model, xs] : deltas)
		out.delta[model] = summarize(xs);
	return out;
}

inline constexpr const char* compare_schema = "compare-v1";
inline constexpr const char* compare_csv_header =
    "schema,kind,taskset,chain,model,alpha,delta,norm_alpha,norm_delta";

// Rows of kind "chain" carry one chain; kinds min, q25, mean, q75 and max
// summarize the normalized values of one model over all chains; kind
// "improvement_pct" holds 100 (1 - mean).
inline std::string comparison_csv(const Comparison& cmp)
{
	std::ostringstream os;
	os << std::fixed << std::setprecision(6);
	os << compare_csv_header << "\n";
	for (const Normalized_chain& n : cmp.chains)
		os << compare_schema << ",chain," << n.taskset << "," << n.chain << "," << n.model << ","
		   << n.alpha << "," << n.delta << "," << n.norm_alpha << "," << n.norm_delta << "\n";
	for (const auto& [model, a] : cmp.alpha) {
		const Summary& d = cmp.delta.at(model);
		const std::pair<const char*, std::pair<double, double>> rows[] = {
		    {"min", {a.min, d.min}},
		    {"q25", {a.q25, d.q25}},
		    {"mean", {a.mean, d.mean}},
		    {"q75", {a.q75, d.q75}},
		    {"max", {a.max, d.max}},
		    {"improvement_pct", {100.0 * (1.0 - a.mean), 100.0 * (1.0 - d.mean)}},
		};
		for (const auto& [kind, v] : rows)
			os << compare_schema << "," << kind << ",*,," << model << ",,," << v.first << ","
			   << v.second << "\n";
	}
	return os.str();
}

} // namespace letlat

#endif
