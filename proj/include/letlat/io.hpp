#ifndef LETLAT_IO_HPP
#define LETLAT_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "letlat/chain_analysis.hpp"
#include "letlat/intervals.hpp"
#include "letlat/schedule.hpp"
#include "letlat/sim_oracle.hpp"
#include "letlat/task_model.hpp"

// JSON interchange formats. Documents keep insertion key order
// (nlohmann::ordered_json).

namespace letlat::io {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Model_error("cannot open " + path);
	std::ostringstream os;
	os << in.rdbuf();
	return os.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Model_error("cannot write " + path);
	out << text;
}

inline json parse(const std::string& text, const std::string& what)
{
	try {
		return json::parse(text);
	} catch (const json::exception& e) {
		throw Model_error(what + ": " + e.what());
	}
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- task set -----------------------------------------------------------

inline json to_json(const TaskSet& ts)
{
	json j;
	j["tick_unit"] = ts.tick_unit();
	j["num_cores"] = ts.num_cores();
	json tasks = json::array();
	for (const Task& t : ts.tasks())
		tasks.push_back(json{{"id", t.id}, {"wcet", t.wcet}, {"period", t.period}, {"core", t.core}});
	j["tasks"] = std::move(tasks);
	json arcs = json::array();
	for (const Arc& a : ts.dag().arcs())
		arcs.push_back(json::array({a.writer, a.reader}));
	j["arcs"] = std::move(arcs);
	json chains = json::array();
	for (const Chain& c : ts.chains())
		chains.push_back(c.tasks);
	j["chains"] = std::move(chains);
	return j;
}

inline TaskSet taskset_from_json(const json& j)
{
	try {
		std::vector<Task> tasks;
		for (const auto& t : j.at("tasks"))
			tasks.push_back(Task{t.at("id").get<int>(), t.at("wcet").get<tick_t>(),
			                     t.at("period").get<tick_t>(), t.value("core", 0)});
		std::vector<Arc> arcs;
		for (const auto& a : j.value("arcs", json::array())) {
			if (!a.is_array() || a.size() != 2)
				throw Model_error("arc must be a [writer, reader] pair");
			arcs.push_back(Arc{a[0].get<int>(), a[1].get<int>()});
		}
		std::vector<std::vector<int>> chains;
		for (const auto& c : j.value("chains", json::array()))
			chains.push_back(c.get<std::vector<int>>());
		return TaskSet(std::move(tasks), std::move(arcs), j.value("num_cores", 1), std::move(chains),
		               j.value("tick_unit", std::string("tick")));
	} catch (const json::exception& e) {
		throw Model_error(std::string("task set: ") + e.what());
	}
}

inline TaskSet load_taskset(const std::string& path)
{
	return taskset_from_json(parse(read_file(path), path));
}

// --- job-level dependencies --------------------------------------------

inline json to_json(const Jld_set& jlds)
{
	json arr = json::array();
	for (const Jld& d : jlds)
		arr.push_back(json::array(
		    {d.predecessor.task, d.predecessor.job, d.successor.task, d.successor.job}));
	return arr;
}

// Accepts either a bare array of [pred_task, pred_job, succ_task, succ_job]
// rows or an object with a "jlds" member holding one.
inline Jld_set jlds_from_json(const json& j)
{
	const json& arr = j.is_object() ? j.at("jlds") : j;
	Jld_set out;
	try {
		for (const auto& row : arr) {
			if (!row.is_array() || row.size() != 4)
				throw Model_error("job-level dependency must be [pred_task, pred_job, succ_task, succ_job]");
			out.insert(Jld{{row[0].get<int>(), row[1].get<tick_t>()},
			               {row[2].get<int>(), row[3].get<tick_t>()}});
		}
	} catch (const json::exception& e) {
		throw Model_error(std::string("job-level dependencies: ") + e.what());
	}
	return out;
}

inline Jld_set load_jlds(const std::string& path)
{
	return jlds_from_json(parse(read_file(path), path));
}

// --- schedule -----------------------------------------------------------

inline json to_json(const Schedule& s)
{
	json j;
	j["hyperperiod"] = s.hyperperiod;
	json cores = json::array();
	for (std::size_t c = 0; c < s.cores.size(); ++c) {
		json segs = json::array();
		for (const Segment& seg : s.cores[c])
			segs.push_back(json::array({seg.task, seg.job, seg.start, seg.end}));
		cores.push_back(json{{"core", c}, {"segments", std::move(segs)}});
	}
	j["cores"] = std::move(cores);
	j["jlds"] = to_json(s.jlds);
	return j;
}

// --- intervals ----------------------------------------------------------

inline json to_json(const Interval_assignment& a)
{
	json j;
	j["model"] = to_string(a.model);
	json arr = json::array();
	for (const auto& [task, iv] : a.by_task)
		arr.push_back(json{{"task", task}, {"begin", iv.begin}, {"end", iv.end}});
	j["intervals"] = std::move(arr);
	return j;
}

inline Interval_assignment intervals_from_json(const json& j)
{
	try {
		Interval_assignment a;
		a.model = parse_interval_model(j.at("model").get<std::string>());
		for (const auto& e : j.at("intervals"))
			a.by_task[e.at("task").get<int>()] =
			    Interval{e.at("begin").get<tick_t>(), e.at("end").get<tick_t>()};
		return a;
	} catch (const json::exception& e) {
		throw Model_error(std::string("intervals: ") + e.what());
	}
}

inline Interval_assignment load_intervals(const std::string& path)
{
	return intervals_from_json(parse(read_file(path), path));
}

// --- analysis report ----------------------------------------------------

// bump when fields or columns change
inline constexpr const char* report_schema = "report-v1";

inline json to_json(const Basic_path& bp)
{
	json pts = json::array();
	for (const Path_point& p : bp.points)
		pts.push_back(json::array({p.publish, p.read}));
	return json{{"n", bp.n},          {"input", bp.input}, {"points", std::move(pts)},
	            {"theta", bp.theta},  {"phi", bp.phi},     {"alpha", bp.alpha},
	            {"delta", bp.delta}};
}

// `model` is the report-level tag: let, wcrt, sa or sa-jld.
inline json report_json(const std::string& taskset_name, const std::string& model,
                        const TaskSet& ts, const Interval_assignment& a,
                        const std::vector<Chain_latencies>& results, const Jld_set& jlds = {})
{
	json j;
	j["schema"] = report_schema;
	j["taskset"] = taskset_name;
	j["model"] = model;
	j["jlds"] = to_json(jlds);
	j["intervals"] = to_json(a)["intervals"];
	json chains = json::array();
	for (const Chain_latencies& cl : results) {
		json paths = json::array();
		for (const Basic_path& bp : cl.paths)
			paths.push_back(to_json(bp));
		chains.push_back(json{{"chain", cl.chain},
		                      {"tasks", ts.chains()[cl.chain].tasks},
		                      {"hyperperiod", ts.chains()[cl.chain].hyperperiod},
		                      {"model", model},
		                      {"alpha", cl.alpha},
		                      {"delta", cl.delta},
		                      {"paths", std::move(paths)}});
	}
	j["chains"] = std::move(chains);
	return j;
}

inline constexpr const char* report_csv_header = "schema,taskset,chain,tasks,model,alpha,delta,paths";

inline std::string report_csv(const std::string& taskset_name, const std::string& model,
                              const TaskSet& ts, const std::vector<Chain_latencies>& results,
                              bool header = true)
{
	std::ostringstream os;
	if (header)
		os << report_csv_header << "\n";
	for (const Chain_latencies& cl : results)
		os << report_schema << "," << taskset_name << "," << cl.chain << ","
		   << format_sequence(ts.chains()[cl.chain].tasks, "-") << "," << model << "," << cl.alpha
		   << "," << cl.delta << "," << cl.paths.size() << "\n";
	return os.str();
}

// --- trace --------------------------------------------------------------

// One JSON object per line; outputs are interleaved after the events.
inline std::string trace_jsonl(const Trace& tr)
{
	std::ostringstream os;
	for (const Trace_event& e : tr.events)
		os << json{{"tick", e.tick},
		           {"kind", e.kind == Access::read ? "read" : "write"},
		           {"task", e.task},
		           {"job", e.job}}
		          .dump()
		   << "\n";
	for (const Chain_output& o : tr.outputs)
		os << json{{"tick", o.tick},
		           {"kind", "output"},
		           {"chain", o.chain},
		           {"input", o.input ? json(*o.input) : json(nullptr)}}
		          .dump()
		   << "\n";
	return os.str();
}

} // namespace letlat::io

#endif
