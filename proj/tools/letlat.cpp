// letlat: command-line front end.
//
//   gen       draw task sets from a benchmark profile
//   schedule  EDF schedule of a task set (JSON, optional ASCII Gantt)
//   analyze   worst-case data age / reaction latency per chain
//   verify    analytic results against the LET simulator
//   search    job-level dependencies that shrink schedule-aware intervals
//   compare   normalize a directory of reports against classic LET
//   rerun     repeat a command from its manifest
//
// Exit codes: 0 ok, 2 input or model error, 3 verification or measurement
// failure.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "letlat/benchgen.hpp"
#include "letlat/chain_analysis.hpp"
#include "letlat/compare.hpp"
#include "letlat/io.hpp"
#include "letlat/jld_search.hpp"
#include "letlat/manifest.hpp"
#include "letlat/schedule.hpp"
#include "letlat/sim_oracle.hpp"

namespace fs = std::filesystem;
using namespace letlat;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_check = 3;

struct Check_failure : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

struct Global
{
	std::uint64_t seed = 1;
	tick_t ticks_per_ms = 100;
	std::string out;
	unsigned jobs = 1;
};

struct Run
{
	Global g;
	std::vector<std::string> args;
	Run_manifest manifest;

	void finish(const std::string& manifest_path)
	{
		manifest.args = args;
		manifest.timestamp = utc_timestamp();
		io::write_file(manifest_path, io::dump(io::to_json(manifest)));
	}
};

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

// task-set files of a path: the file itself, or the sorted *.json of a directory
std::vector<std::string> input_files(const std::string& path)
{
	if (!fs::exists(path))
		throw Model_error("no such file or directory: " + path);
	if (!fs::is_directory(path))
		return {path};
	std::vector<std::string> out;
	for (const auto& e : fs::directory_iterator(path))
		if (e.is_regular_file() && e.path().extension() == ".json" &&
		    e.path().filename().string().find(".manifest") == std::string::npos)
			out.push_back(e.path().string());
	std::sort(out.begin(), out.end());
	if (out.empty())
		throw Model_error("no .json files in " + path);
	return out;
}

// Runs fn over items with up to `jobs` workers. The first exception (by item
// order) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn)
{
	std::vector<std::exception_ptr> errors(count);
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t i; (i = next++) < count;) {
			try {
				fn(i);
			} catch (...) {
				errors[i] = std::current_exception();
			}
		}
	};
	std::vector<std::thread> pool;
	for (unsigned w = 1; w < std::max(1u, jobs); ++w)
		pool.emplace_back(worker);
	worker();
	for (auto& t : pool)
		t.join();
	for (auto& e : errors)
		if (e)
			std::rethrow_exception(e);
}

void emit(const std::string& out, const std::string& text)
{
	if (out.empty() || out == "-")
		std::cout << text;
	else
		io::write_file(out, text);
}

std::string with_extension(const std::string& path, const std::string& ext)
{
	return fs::path(path).replace_extension(ext).string();
}

// --- gen -----------------------------------------------------------------

int cmd_gen(Run& run, const std::string& profile_arg, int count)
{
	Gen_profile p;
	if (profile_arg == "automotive" || profile_arg == "synthetic")
		p = profile_by_name(profile_arg);
	else if (fs::exists(profile_arg))
		p = profile_from_json(io::parse(io::read_file(profile_arg), profile_arg));
	else
		throw Model_error("unknown profile '" + profile_arg +
		                  "' (expected automotive, synthetic or a profile file)");
	p.ticks_per_ms = run.g.ticks_per_ms;
	if (count < 1)
		throw Model_error("--count must be >= 1");

	run.manifest.profile = profile_arg;
	run.manifest.seed = run.g.seed;
	if (fs::exists(profile_arg))
		run.manifest.inputs.push_back(profile_arg);

	if (count == 1 && (run.g.out.empty() || fs::path(run.g.out).extension() == ".json")) {
		p.seed = run.g.seed;
		std::string text = io::dump(io::to_json(gen_taskset(p)));
		emit(run.g.out, text);
		if (!run.g.out.empty()) {
			run.manifest.outputs.push_back(run.g.out);
			run.finish(with_extension(run.g.out, ".manifest.json"));
		}
		return exit_ok;
	}

	if (run.g.out.empty())
		throw Model_error("gen --count > 1 needs --out DIR");
	fs::create_directories(run.g.out);
	std::vector<std::string> names(count);
	parallel_for(count, run.g.jobs, [&](std::size_t i) {
		Gen_profile q = p;
		q.seed = run.g.seed + i;
		names[i] = (fs::path(run.g.out) / (p.name + "_" + std::to_string(q.seed) + ".json")).string();
		io::write_file(names[i], io::dump(io::to_json(gen_taskset(q))));
	});
	run.manifest.outputs = names;
	run.finish((fs::path(run.g.out) / "gen.manifest.json").string());
	return exit_ok;
}

// --- schedule ------------------------------------------------------------

int cmd_schedule(Run& run, const std::string& input, const std::string& jld_file, bool show_gantt,
                 tick_t gantt_ticks)
{
	TaskSet ts = io::load_taskset(input);
	Jld_set jlds = jld_file.empty() ? Jld_set{} : io::load_jlds(jld_file);
	Schedule s = schedule_edf(ts, jlds);
	run.manifest.inputs = {input};
	if (!jld_file.empty())
		run.manifest.inputs.push_back(jld_file);
	if (show_gantt)
		std::cout << gantt(s, gantt_ticks);
	if (!show_gantt || !run.g.out.empty())
		emit(run.g.out, io::dump(io::to_json(s)));
	if (!run.g.out.empty()) {
		run.manifest.outputs = {run.g.out};
		run.finish(with_extension(run.g.out, ".manifest.json"));
	}
	return exit_ok;
}

// --- analyze -------------------------------------------------------------

struct Analysis
{
	std::string model_tag; // let, wcrt, sa, sa-jld
	Interval_assignment intervals;
	std::vector<Chain_latencies> results;
	Jld_set jlds;
};

Analysis analyze_file(const TaskSet& ts, Interval_model model, const Jld_set& jlds)
{
	Analysis a;
	a.jlds = jlds;
	switch (model) {
	case Interval_model::let:
		a.intervals = classic_let(ts);
		break;
	case Interval_model::wcrt:
		a.intervals = wcrt_let(schedule_edf(ts, jlds));
		break;
	case Interval_model::schedule_aware:
		a.intervals = schedule_aware(schedule_edf(ts, jlds));
		break;
	}
	a.model_tag = to_string(model);
	if (model == Interval_model::schedule_aware && !jlds.empty())
		a.model_tag = "sa-jld";
	a.results = analyze(ts, a.intervals);
	return a;
}

int cmd_analyze(Run& run, const std::string& input, const std::string& model_arg,
                const std::string& jld_file)
{
	const Interval_model model = parse_interval_model(model_arg);
	const Jld_set jlds = jld_file.empty() ? Jld_set{} : io::load_jlds(jld_file);
	const std::vector<std::string> files = input_files(input);
	const bool batch = fs::is_directory(input);
	if (batch && !jlds.empty())
		throw Model_error("--jld applies to a single task set, not a directory");
	run.manifest.inputs = files;
	if (!jld_file.empty())
		run.manifest.inputs.push_back(jld_file);

	if (!batch) {
		TaskSet ts = io::load_taskset(input);
		Analysis a = analyze_file(ts, model, jlds);
		const std::string name = stem(input);
		emit(run.g.out, io::dump(io::report_json(name, a.model_tag, ts, a.intervals, a.results, jlds)));
		if (!run.g.out.empty() && run.g.out != "-") {
			const std::string csv = with_extension(run.g.out, ".csv");
			io::write_file(csv, io::report_csv(name, a.model_tag, ts, a.results));
			run.manifest.outputs = {run.g.out, csv};
			run.finish(with_extension(run.g.out, ".manifest.json"));
		}
		return exit_ok;
	}

	if (run.g.out.empty())
		throw Model_error("analyze on a directory needs --out DIR");
	fs::create_directories(run.g.out);
	std::vector<std::string> csv_parts(files.size());
	std::vector<std::string> outputs(files.size());
	parallel_for(files.size(), run.g.jobs, [&](std::size_t i) {
		TaskSet ts = io::load_taskset(files[i]);
		Analysis a = analyze_file(ts, model, {});
		const std::string name = stem(files[i]);
		outputs[i] = (fs::path(run.g.out) / (name + "." + a.model_tag + ".json")).string();
		io::write_file(outputs[i], io::dump(io::report_json(name, a.model_tag, ts, a.intervals, a.results)));
		csv_parts[i] = io::report_csv(name, a.model_tag, ts, a.results, false);
	});
	std::string csv = std::string(io::report_csv_header) + "\n";
	for (const std::string& part : csv_parts)
		csv += part;
	const std::string csv_path = (fs::path(run.g.out) / ("analyze." + std::string(to_string(model)) + ".csv")).string();
	io::write_file(csv_path, csv);
	outputs.push_back(csv_path);
	run.manifest.outputs = outputs;
	run.finish((fs::path(run.g.out) / ("analyze." + std::string(to_string(model)) + ".manifest.json")).string());
	return exit_ok;
}

// --- verify --------------------------------------------------------------

int cmd_verify(Run& run, const std::string& input, const std::string& model_arg,
               const std::string& jld_file, const std::string& intervals_file, int horizon_hps)
{
	TaskSet ts = io::load_taskset(input);
	const Jld_set jlds = jld_file.empty() ? Jld_set{} : io::load_jlds(jld_file);
	std::vector<Interval_model> models;
	if (model_arg == "all")
		models = {Interval_model::let, Interval_model::wcrt, Interval_model::schedule_aware};
	else
		models = {parse_interval_model(model_arg)};
	if (!intervals_file.empty() && models.size() != 1)
		throw Model_error("--intervals needs a single --model");
	std::optional<Interval_assignment> claimed;
	if (!intervals_file.empty()) {
		claimed = io::load_intervals(intervals_file);
		validate(ts, *claimed);
	}
	run.manifest.inputs = {input};
	if (!jld_file.empty())
		run.manifest.inputs.push_back(jld_file);
	if (!intervals_file.empty())
		run.manifest.inputs.push_back(intervals_file);

	std::ostringstream report;
	bool ok = true;
	for (Interval_model m : models) {
		Analysis truth = analyze_file(ts, m, jlds);
		// the analysis runs on the claimed intervals, the simulator on the
		// ones the model derives from the task set
		const Interval_assignment& analyzed = claimed ? *claimed : truth.intervals;
		const std::vector<Chain_latencies> analytic = claimed ? analyze(ts, analyzed) : truth.results;
		std::vector<Empirical_latencies> measured;
		if (horizon_hps > 0) {
			Trace tr = simulate(ts, truth.intervals, horizon_hps * ts.hyperperiod());
			for (std::size_t c = 0; c < ts.chains().size(); ++c)
				measured.push_back(empirical_latencies(tr, c));
		} else {
			measured = measure_all(ts, truth.intervals);
		}
		for (std::size_t c = 0; c < ts.chains().size(); ++c) {
			const bool match = analytic[c].alpha == measured[c].worst_age &&
			                   analytic[c].delta == measured[c].worst_reaction;
			ok = ok && match;
			report << (match ? "ok   " : "DIFF ") << truth.model_tag << " chain " << c << " ("
			       << format_sequence(ts.chains()[c].tasks) << "): analytic alpha="
			       << analytic[c].alpha << " delta=" << analytic[c].delta
			       << " simulated alpha=" << measured[c].worst_age
			       << " delta=" << measured[c].worst_reaction << "\n";
		}
	}
	report << (ok ? "PASS" : "FAIL") << "\n";
	emit(run.g.out, report.str());
	if (!run.g.out.empty() && run.g.out != "-") {
		run.manifest.outputs = {run.g.out};
		run.finish(with_extension(run.g.out, ".manifest.json"));
	}
	if (!ok)
		throw Check_failure("analytic and simulated latencies differ");
	return exit_ok;
}

// --- search --------------------------------------------------------------

io::json search_json(const std::string& name, const TaskSet& ts, const Search_options& opt,
                     const Search_result& r)
{
	auto lat = [](const std::vector<Latency_pair>& v) {
		io::json arr = io::json::array();
		for (const Latency_pair& p : v)
			arr.push_back(io::json{{"alpha", p.alpha}, {"delta", p.delta}});
		return arr;
	};
	io::json j;
	j["taskset"] = name;
	j["objective"] = to_string(opt.objective);
	j["budget"] = io::json{
	    {"seconds", opt.budget.seconds ? io::json(*opt.budget.seconds) : io::json(nullptr)},
	    {"expansions", opt.budget.expansions ? io::json(*opt.budget.expansions) : io::json(nullptr)}};
	j["max_children"] = opt.max_children;
	j["terminated_by"] = r.terminated_by;
	j["nodes_expanded"] = r.nodes_expanded;
	j["nodes_evaluated"] = r.nodes_evaluated;
	j["improved_chains"] = r.best.eval.score;
	j["chains"] = ts.chains().size();
	j["root"] = lat(r.root.latencies);
	j["best"] = lat(r.best.latencies);
	j["added_jlds"] = io::to_json(r.added);
	return j;
}

int cmd_search(Run& run, const std::string& input, const Search_options& opt,
               const std::string& jld_file)
{
	const std::vector<std::string> files = input_files(input);
	const Jld_set initial = jld_file.empty() ? Jld_set{} : io::load_jlds(jld_file);
	if (fs::is_directory(input) && !initial.empty())
		throw Model_error("--jld applies to a single task set, not a directory");
	run.manifest.inputs = files;
	if (!jld_file.empty())
		run.manifest.inputs.push_back(jld_file);
	run.manifest.objective = to_string(opt.objective);
	run.manifest.budget_seconds = opt.budget.seconds;
	run.manifest.budget_expansions = opt.budget.expansions;

	const std::string dir = run.g.out.empty() ? "." : run.g.out;
	fs::create_directories(dir);
	std::vector<std::vector<std::string>> outputs(files.size());
	std::mutex log;
	parallel_for(files.size(), run.g.jobs, [&](std::size_t i) {
		TaskSet ts = io::load_taskset(files[i]);
		Search_result r = search(ts, opt, initial);
		const std::string name = stem(files[i]);
		const fs::path base = fs::path(dir) / name;
		Interval_assignment a = schedule_aware(r.best_schedule);
		std::vector<Chain_latencies> res = analyze(ts, a);
		const std::string tag = r.best.jlds.empty() ? "sa" : "sa-jld";
		auto out = [&](const std::string& suffix) { return base.string() + suffix; };
		io::write_file(out(".search.json"), io::dump(search_json(name, ts, opt, r)));
		io::write_file(out(".jlds.json"), io::dump(io::to_json(r.best.jlds)));
		io::write_file(out(".sa-jld.json"),
		               io::dump(io::report_json(name, "sa-jld", ts, a, res, r.best.jlds)));
		io::write_file(out(".sa-jld.csv"), io::report_csv(name, "sa-jld", ts, res));
		outputs[i] = {out(".search.json"), out(".jlds.json"), out(".sa-jld.json"), out(".sa-jld.csv")};
		std::lock_guard<std::mutex> lock(log);
		std::cerr << name << ": " << r.terminated_by << ", " << r.nodes_expanded << " expanded, "
		          << r.best.eval.score << "/" << ts.chains().size() << " chains improved, "
		          << r.added.size() << " dependencies added (" << tag << ", "
		          << r.wall_seconds << " s)\n";
	});
	for (const auto& o : outputs)
		run.manifest.outputs.insert(run.manifest.outputs.end(), o.begin(), o.end());
	const std::string manifest = fs::is_directory(input)
	                                 ? (fs::path(dir) / "search.manifest.json").string()
	                                 : (fs::path(dir) / (stem(input) + ".search.manifest.json")).string();
	run.finish(manifest);
	return exit_ok;
}

// --- compare -------------------------------------------------------------

int cmd_compare(Run& run, const std::string& dir)
{
	if (!fs::is_directory(dir))
		throw Model_error("compare needs a directory of reports: " + dir);
	std::vector<std::string> files;
	for (const auto& e : fs::directory_iterator(dir))
		if (e.is_regular_file() && e.path().extension() == ".json")
			files.push_back(e.path().string());
	std::sort(files.begin(), files.end());
	std::vector<io::json> reports;
	for (const std::string& f : files) {
		io::json j = io::parse(io::read_file(f), f);
		if (j.is_object() && j.value("schema", std::string()) == io::report_schema) {
			reports.push_back(std::move(j));
			run.manifest.inputs.push_back(f);
		}
	}
	if (reports.empty())
		throw Model_error("no analysis reports in " + dir);
	Comparison cmp = compare_reports(reports);
	for (const std::string& s : cmp.skipped)
		std::cerr << "warning: task set " << s << " has no let report, skipped\n";
	emit(run.g.out, comparison_csv(cmp));
	if (!run.g.out.empty() && run.g.out != "-") {
		run.manifest.outputs = {run.g.out};
		run.finish(with_extension(run.g.out, ".manifest.json"));
	}
	return exit_ok;
}

int dispatch(std::vector<std::string> args);

int cmd_rerun(const std::string& manifest_path)
{
	Run_manifest m = io::manifest_from_json(io::parse(io::read_file(manifest_path), manifest_path));
	if (m.args.empty() || m.args.front() == "rerun")
		throw Model_error("manifest " + manifest_path + " holds no rerunnable command");
	return dispatch(m.args);
}

int dispatch(std::vector<std::string> args)
{
	CLI::App app{"LET end-to-end latency analysis, simulation and dependency search", "letlat"};
	app.require_subcommand(1);
	app.set_version_flag("--version", std::string(version));

	Run run;
	run.args = args;
	app.add_option("--seed", run.g.seed, "Base seed")->capture_default_str();
	app.add_option("--ticks-per-ms", run.g.ticks_per_ms, "Ticks per millisecond for generated sets")
	    ->check(CLI::PositiveNumber)
	    ->capture_default_str();
	app.add_option("--out", run.g.out, "Output file or directory (default: stdout)");
	app.add_option("--jobs", run.g.jobs, "Parallel workers for batch inputs")
	    ->check(CLI::PositiveNumber)
	    ->capture_default_str();

	std::string profile = "automotive";
	int count = 1;
	auto* gen = app.add_subcommand("gen", "Generate task sets from a benchmark profile");
	gen->add_option("--profile", profile, "automotive, synthetic, or a profile JSON file")
	    ->capture_default_str();
	gen->add_option("--count", count, "Number of task sets (seeds seed .. seed+count-1)")
	    ->capture_default_str();

	std::string input, jld_file, intervals_file, model = "sa";
	bool show_gantt = false;
	tick_t gantt_ticks = 200;
	auto* sched = app.add_subcommand("schedule", "EDF schedule of a task set");
	sched->add_option("taskset", input, "Task-set file")->required();
	sched->add_option("--jld", jld_file, "Job-level dependency file");
	sched->add_flag("--gantt", show_gantt, "Print an ASCII Gantt chart");
	sched->add_option("--gantt-ticks", gantt_ticks, "Ticks shown in the chart")->capture_default_str();

	auto* an = app.add_subcommand("analyze", "Worst-case data age and reaction latency per chain");
	an->add_option("taskset", input, "Task-set file or directory")->required();
	an->add_option("--model", model, "let, wcrt or sa")->capture_default_str();
	an->add_option("--jld", jld_file, "Job-level dependencies applied before interval synthesis");

	int horizon_hps = 0;
	auto* ver = app.add_subcommand("verify", "Check the analysis against the simulator");
	ver->add_option("taskset", input, "Task-set file")->required();
	ver->add_option("--model", model, "let, wcrt, sa or all")->capture_default_str();
	ver->add_option("--jld", jld_file, "Job-level dependency file");
	ver->add_option("--intervals", intervals_file, "Intervals to analyze instead of the model's");
	ver->add_option("--horizon-hps", horizon_hps,
	                "Simulate exactly this many hyperperiods (default: grow until measurable)")
	    ->check(CLI::NonNegativeNumber);

	Search_options opt;
	std::string objective = "age";
	double budget_seconds = 60.0;
	std::size_t budget_expansions = 0;
	auto* se = app.add_subcommand("search", "Search job-level dependencies");
	se->add_option("taskset", input, "Task-set file or directory")->required();
	auto* secs = se->add_option("--budget-seconds", budget_seconds, "Wall-clock budget per task set")
	                 ->check(CLI::NonNegativeNumber)
	                 ->capture_default_str();
	auto* exps = se->add_option("--budget-expansions", budget_expansions,
	                            "Expansion budget per task set (deterministic)");
	se->add_option("--objective", objective, "age, reaction or both")->capture_default_str();
	se->add_option("--max-children", opt.max_children, "Candidates per expansion, 0 for all")
	    ->capture_default_str();
	se->add_option("--jld", jld_file, "Dependencies every node starts from");

	std::string dir;
	auto* cmp = app.add_subcommand("compare", "Normalize a directory of reports against let");
	cmp->add_option("dir", dir, "Directory of analysis reports")->required();

	std::string manifest;
	auto* rr = app.add_subcommand("rerun", "Repeat the command recorded in a manifest");
	rr->add_option("manifest", manifest, "Manifest file")->required();

	std::vector<std::string> rev(args.rbegin(), args.rend());
	try {
		app.parse(rev);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? exit_ok : exit_input;
	}

	try {
		run.manifest.command = app.get_subcommands().front()->get_name();
		if (*gen)
			return cmd_gen(run, profile, count);
		if (*sched)
			return cmd_schedule(run, input, jld_file, show_gantt, gantt_ticks);
		if (*an)
			return cmd_analyze(run, input, model, jld_file);
		if (*ver)
			return cmd_verify(run, input, model, jld_file, intervals_file, horizon_hps);
		if (*se) {
			opt.objective = parse_objective(objective);
			opt.budget.seconds.reset();
			if (*exps)
				opt.budget.expansions = budget_expansions;
			if (*secs || !*exps)
				opt.budget.seconds = budget_seconds;
			return cmd_search(run, input, opt, jld_file);
		}
		if (*cmp)
			return cmd_compare(run, dir);
		if (*rr)
			return cmd_rerun(manifest);
	} catch (const Check_failure& e) {
		std::cerr << "letlat: " << e.what() << "\n";
		return exit_check;
	} catch (const Measurement_error& e) {
		std::cerr << "letlat: measurement error: " << e.what() << "\n";
		return exit_check;
	} catch (const Infeasible_error& e) {
		std::cerr << "letlat: infeasible: " << e.what() << "\n";
		return exit_input;
	} catch (const Generation_error& e) {
		std::cerr << "letlat: generation failed: " << e.what() << "\n";
		return exit_input;
	} catch (const Model_error& e) {
		std::cerr << "letlat: " << e.what() << "\n";
		return exit_input;
	} catch (const fs::filesystem_error& e) {
		std::cerr << "letlat: " << e.what() << "\n";
		return exit_input;
	}
	return exit_input;
}

} // namespace

int main(int argc, char** argv)
{
	return dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
