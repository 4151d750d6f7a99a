#ifndef LETLAT_MANIFEST_HPP
#define LETLAT_MANIFEST_HPP

#include <chrono>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "letlat/io.hpp"

namespace letlat {

inline constexpr const char* version = "0.1.0";

// Everything needed to rerun a command. `args` is the full argument vector
// after the program name; rerunning it with an expansion-count budget gives
// byte-identical outputs.
struct Run_manifest
{
	std::string command;
	std::vector<std::string> args;
	std::vector<std::string> inputs;
	std::vector<std::string> outputs;
	std::optional<std::string> profile;
	std::optional<std::uint64_t> seed;
	std::optional<double> budget_seconds;
	std::optional<std::size_t> budget_expansions;
	std::optional<std::string> objective;
	std::string tool_version = version;
	std::string timestamp; // UTC, ISO 8601
};

inline std::string utc_timestamp()
{
	const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&now, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

namespace io {

inline json to_json(const Run_manifest& m)
{
	json j;
	j["command"] = m.command;
	j["args"] = m.args;
	j["inputs"] = m.inputs;
	j["outputs"] = m.outputs;
	j["profile"] = m.profile ? json(*m.profile) : json(nullptr);
	j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
	j["budget"] = json{{"seconds", m.budget_seconds ? json(*m.budget_seconds) : json(nullptr)},
	                   {"expansions", m.budget_expansions ? json(*m.budget_expansions) : json(nullptr)}};
	j["objective"] = m.objective ? json(*m.objective) : json(nullptr);
	j["tool_version"] = m.tool_version;
	j["timestamp"] = m.timestamp;
	return j;
}

inline Run_manifest manifest_from_json(const json& j)
{
	try {
		Run_manifest m;
		m.command = j.at("command").get<std::string>();
		m.args = j.at("args").get<std::vector<std::string>>();
		m.inputs = j.value("inputs", std::vector<std::string>{});
		m.outputs = j.value("outputs", std::vector<std::string>{});
		if (j.contains("profile") && !j["profile"].is_null())
			m.profile = j["profile"].get<std::string>();
		if (j.contains("seed") && !j["seed"].is_null())
			m.seed = j["seed"].get<std::uint64_t>();
		if (j.contains("budget")) {
			const json& b = j["budget"];
			if (b.contains("seconds") && !b["seconds"].is_null())
				m.budget_seconds = b["seconds"].get<double>();
			if (b.contains("expansions") && !b["expansions"].is_null())
				m.budget_expansions = b["expansions"].get<std::size_t>();
		}
		if (j.contains("objective") && !j["objective"].is_null())
			m.objective = j["objective"].get<std::string>();
		m.tool_version = j.value("tool_version", std::string());
		m.timestamp = j.value("timestamp", std::string());
		return m;
	} catch (const json::exception& e) {
		throw Model_error(std::string("manifest: ") + e.what());
	}
}

} // namespace io
} // namespace letlat

#endif
