// homectx: load context data, run queries, reason, replay and serve sensor traces.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>

#include "homectx/homectx.hpp"
#include "homectx/server.hpp"

namespace {

using namespace homectx;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kContractViolation = 2;

struct GlobalOptions {
    std::vector<std::string> data;
    std::string thresholds;
    std::string output = "table";
    std::uint64_t seed = 42;
    std::uint16_t port = 7878;
};

OutputMode output_mode(const GlobalOptions& g) { return g.output == "tsv" ? OutputMode::kTsv : OutputMode::kTable; }

TripleStore load_store(const GlobalOptions& g) {
    TripleStore store;
    for (const auto& path : g.data) store.insert_all(load_data_file(path));
    return store;
}

DedupConfig load_thresholds(const GlobalOptions& g) {
    return g.thresholds.empty() ? DedupConfig{} : load_dedup_config(g.thresholds);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_query(const GlobalOptions& g, const std::string& query_arg) {
    TripleStore store;
    Query q;
    try {
        store = load_store(g);
        const bool is_file = std::ifstream(query_arg).good();
        try {
            q = parse_query(is_file ? read_file(query_arg) : query_arg);
        } catch (const ParseError& e) {
            throw ParseError(e.line(), e.column(), (is_file ? query_arg : std::string("query")) + ": " + e.detail());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    try {
        std::cout << format_results(evaluate(store, q), output_mode(g));
    } catch (const std::exception& e) {
        std::cerr << "evaluation error: " << e.what() << '\n';
        return kContractViolation;
    }
    return kOk;
}

ResultTable command_table(const std::vector<ApplianceCommand>& cmds) {
    ResultTable rt;
    for (const char* h : {"appliance", "state", "person", "activity", "priority"}) rt.header.push_back(Variable{h});
    for (const auto& c : cmds)
        rt.rows.push_back({c.appliance, Term::boolean(c.state), c.person, c.activity,
                           Term::literal(std::to_string(c.priority), Datatype::kPositiveInteger)});
    return rt;
}

int cmd_reason(const GlobalOptions& g, const std::string& time_arg) {
    TimeOfDay t;
    try {
        t = TimeOfDay::parse_compact(time_arg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kFailure;
    }
    try {
        std::cout << format_results(command_table(reason_at(load_store(g), t)), output_mode(g));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

void print_stats(const IngestStats& s) {
    std::cout << "input_count=" << s.input_count << "\n"
              << "stored_count=" << s.stored_count << "\n"
              << "reduction_factor=" << s.reduction_factor() << "\n"
              << "commands_emitted=" << s.commands_emitted << "\n";
}

int cmd_replay(const GlobalOptions& g, const std::string& trace_path, bool print_commands) {
    try {
        std::ifstream trace(trace_path);
        if (!trace) throw std::runtime_error("cannot open trace " + trace_path);
        Engine engine(load_thresholds(g));
        engine.load(load_store(g).triples());
        const ReplayResult result = replay(trace, engine);
        if (print_commands)
            for (const auto& c : result.commands) std::cout << wire::encode(c) << '\n';
        print_stats(result.stats);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

int cmd_serve(const GlobalOptions& g, const std::string& address) {
    // Block termination signals before any thread starts so sigwait sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        Engine engine(load_thresholds(g));
        engine.load(load_store(g).triples());
        Server server(engine, address, g.port);
        server.start();
        std::cout << "listening on " << address << ":" << server.port() << std::endl;
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
        server.wait();
        print_stats(engine.stats());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

int cmd_gen_trace(const GlobalOptions& g, TraceParams params, const std::string& out_path,
                  const std::string& date, const std::string& start) {
    try {
        params.seed = g.seed;
        params.thresholds = load_thresholds(g);
        params.date = Date::parse(date);
        params.start = TimeOfDay::parse_compact(start);
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        const TraceManifest manifest = generate_trace(params, out);
        std::ofstream(out_path + ".manifest.json", std::ios::binary) << manifest.to_json();
        std::cout << "lines=" << manifest.lines << "\n"
                  << "events=" << manifest.events.size() << "\n"
                  << "expected_stored=" << manifest.expected_stored() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

int cmd_load(const GlobalOptions& g, const std::string& out_path) {
    try {
        const TripleStore store = load_store(g);
        const HomeModel model = load_home_model(store);
        const std::string text = serialize(store);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream(out_path, std::ios::binary) << text;
        }
        std::cerr << store.size() << " triples, " << model.persons.size() << " persons, "
                  << model.activities.size() << " activities, " << model.preferences.size() << " preferences\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homectx - ontology-based smart-home context engine"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--data", g.data, "Turtle-subset data files")->check(CLI::ExistingFile);
    app.add_option("--thresholds", g.thresholds, "Dedup threshold overrides (name = value lines)")
        ->check(CLI::ExistingFile);
    app.add_option("--output", g.output, "Result format")->check(CLI::IsMember({"table", "tsv"}));
    app.add_option("--seed", g.seed, "Trace generation seed");
    app.add_option("--port", g.port, "TCP port for serve (0 picks a free port)");

    std::string query_arg;
    auto* query = app.add_subcommand("query", "Evaluate a query (file path or literal text)");
    query->add_option("query", query_arg)->required();

    std::string time_arg;
    auto* reason = app.add_subcommand("reason", "Emit appliance commands for a time of day (HHMMSS)");
    reason->add_option("time", time_arg)->required();

    std::string trace_path;
    bool print_commands = false;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a trace file offline and print statistics");
    replay_cmd->add_option("trace", trace_path)->required();
    replay_cmd->add_flag("--commands", print_commands, "Also print emitted commands");

    std::string address = "127.0.0.1";
    auto* serve = app.add_subcommand("serve", "Accept sensor readings over TCP (line-delimited JSON)");
    serve->add_option("--address", address, "Address to bind");

    TraceParams params;
    std::string gen_out, gen_date = "2007-04-11", gen_start = "080000";
    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic sensor trace and its manifest");
    gen->add_option("--out", gen_out, "Trace output path")->required();
    gen->add_option("--streams", params.streams);
    gen->add_option("--duration", params.duration, "Seconds");
    gen->add_option("--rate", params.rate, "Readings per second per stream");
    gen->add_option("--events", params.events, "Injected supra-threshold events");
    gen->add_option("--drift-period", params.drift_period, "Seconds between per-stream drift steps (0 = off)");
    gen->add_option("--temp-noise", params.temperature_noise, "Relative noise amplitude");
    gen->add_option("--humidity-noise", params.humidity_noise, "Relative noise amplitude");
    gen->add_option("--illum-noise", params.illumination_noise, "Relative noise amplitude");
    gen->add_option("--date", gen_date, "YYYY-MM-DD");
    gen->add_option("--start", gen_start, "HHMMSS");

    std::string load_out;
    auto* load = app.add_subcommand("load", "Validate data files and print them canonicalized");
    load->add_option("--out", load_out, "Write canonical text here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kFailure;
    }

    if (*query) return cmd_query(g, query_arg);
    if (*reason) return cmd_reason(g, time_arg);
    if (*replay_cmd) return cmd_replay(g, trace_path, print_commands);
    if (*serve) return cmd_serve(g, address);
    if (*gen) return cmd_gen_trace(g, params, gen_out, gen_date, gen_start);
    if (*load) return cmd_load(g, load_out);
    return kFailure;
}
