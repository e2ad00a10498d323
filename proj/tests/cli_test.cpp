#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/asio.hpp>
#include <json.hpp>
#include <gtest/gtest.h>

#include "serve_process.hpp"
#include "test_support.hpp"

namespace homectx {
namespace {

namespace fs = std::filesystem;

struct CliRun {
    int status = -1;
    std::string out;
    std::string err;
};

// Runs the CLI with `args` (already shell-quoted where needed).
CliRun run(const std::string& args) {
    static int counter = 0;
    const fs::path err_path = fs::temp_directory_path() / ("homectx_cli_err_" + std::to_string(::getpid()) + "_" +
                                                           std::to_string(counter++));
    const std::string cmd = std::string("'") + HOMECTX_CLI + "' " + args + " 2>'" + err_path.string() + "'";
    CliRun r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream err(err_path);
    std::stringstream ss;
    ss << err.rdbuf();
    r.err = ss.str();
    fs::remove(err_path);
    return r;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("homectx_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

const std::string kFixture = "--data " + quoted(testing::fixture_path());

TEST(Cli, ApplianceQueryAsTsv) {
    const CliRun r = run(kFixture + " --output tsv query " + quoted(testing::appliance_query_path()));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "person\twhat\tappliance\tstatus\tpriority");
    const std::set<std::string> rows(lines.begin() + 1, lines.end());
    EXPECT_EQ(rows, (std::set<std::string>{"Son\tSelf-study\tTV\tfalse\t5", "Son\tSelf-study\tAirConditioner\ttrue\t5",
                                           "Son\tSelf-study\tLight\ttrue\t5",
                                           "Son\tSelf-study\tProjector\ttrue\t5"}));
}

TEST(Cli, QueryLiteralTextAndTable) {
    const CliRun r = run(kFixture + " query 'SELECT ?p ?n WHERE { ?p :hasPriority ?n } ORDER BY DESC(?n)'");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "p       n\nFather  8\nSon     5\n");
}

TEST(Cli, QueryWithoutDataGivesHeaderOnly) {
    const CliRun r = run("--output tsv query " + quoted(testing::appliance_query_path()));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "person\twhat\tappliance\tstatus\tpriority\n");
}

TEST(Cli, QueryErrorsExitOne) {
    CliRun r = run(kFixture + " query 'SELECT ?x WHERE { ?x :p }'");
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
    r = run(kFixture + " query 'SELECT ?x WHERE { ?x :p ?y OPTIONAL { ?x :q ?z } }'");
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("unsupported feature OPTIONAL"), std::string::npos) << r.err;
    r = run("--data /nonexistent.ttl query 'SELECT ?x WHERE { ?x :p ?y }'");
    EXPECT_EQ(r.status, 1);
    r = run("frobnicate");
    EXPECT_EQ(r.status, 1);
    r = run("");
    EXPECT_EQ(r.status, 1);
}

TEST(Cli, Reason) {
    CliRun r = run(kFixture + " --output tsv reason 180000");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out,
              "appliance\tstate\tperson\tactivity\tpriority\n"
              "AirConditioner\ttrue\tSon\tSelf-study\t5\n"
              "Light\ttrue\tSon\tSelf-study\t5\n"
              "Projector\ttrue\tSon\tSelf-study\t5\n"
              "TV\tfalse\tSon\tSelf-study\t5\n");

    r = run(kFixture + " --output tsv reason 030000");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "appliance\tstate\tperson\tactivity\tpriority\n");

    r = run(kFixture + " reason 9999");
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("usage error"), std::string::npos) << r.err;
}

TEST(Cli, GenTraceThenReplay) {
    TempDir dir;
    const std::string trace = dir.file("trace.jsonl");
    CliRun r = run("--seed 7 gen-trace --out " + quoted(trace) + " --streams 3 --duration 120 --events 4");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "lines=360\nevents=4\nexpected_stored=7\n");
    ASSERT_TRUE(fs::exists(trace + ".manifest.json"));
    std::ifstream mf(trace + ".manifest.json");
    const auto manifest = nlohmann::json::parse(mf);
    EXPECT_EQ(manifest["expected_stored"], 7);

    r = run("replay " + quoted(trace));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "input_count=360\nstored_count=7\nreduction_factor=51.4286\ncommands_emitted=0\n");

    // Same seed, same bytes.
    const std::string again = dir.file("again.jsonl");
    run("--seed 7 gen-trace --out " + quoted(again) + " --streams 3 --duration 120 --events 4");
    std::ifstream a(trace), b(again);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());

    r = run("gen-trace --out " + quoted(dir.file("x.jsonl")) + " --start 233000");
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("midnight"), std::string::npos) << r.err;
}

TEST(Cli, ReplayConstantTraceWithCommands) {
    TempDir dir;
    const std::string trace = dir.file("const.jsonl");
    {
        std::ofstream out(trace);
        EnvironmentReading r;
        r.humidity = 30;
        r.temperature = 20;
        r.illumination = 400;
        r.date = Date{2007, 4, 11};
        r.persons_present = {Term::home("Son")};
        for (int i = 0; i < 100; ++i) {
            r.time = TimeOfDay::from_seconds(18 * 3600 + i);
            out << wire::encode(r) << '\n';
        }
    }
    const CliRun r = run(kFixture + " replay --commands " + quoted(trace));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 8u);
    EXPECT_EQ(lines[3],
              R"({"type":"command","appliance":"TV","state":false,"person":"Son","activity":"Self-study","priority":5})");
    EXPECT_EQ(lines[4], "input_count=100");
    EXPECT_EQ(lines[5], "stored_count=1");
    EXPECT_EQ(lines[6], "reduction_factor=100");
    EXPECT_EQ(lines[7], "commands_emitted=4");
}

TEST(Cli, ReplayErrors) {
    CliRun r = run("replay /nonexistent/trace.jsonl");
    EXPECT_EQ(r.status, 1);
    TempDir dir;
    const std::string bad = dir.file("bad.jsonl");
    std::ofstream(bad) << "{\"type\":\"reading\"}\n";
    r = run("replay " + quoted(bad));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("trace line 1"), std::string::npos) << r.err;
}

TEST(Cli, LoadPrintsCanonicalForm) {
    const CliRun r = run(kFixture + " load");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, serialize(testing::fixture_store()));
    EXPECT_NE(r.err.find("2 persons"), std::string::npos) << r.err;

    TempDir dir;
    const std::string broken = dir.file("broken.ttl");
    std::ofstream(broken) << ":a :p \"1\"^^xsd:int .\n";
    const CliRun bad = run("--data " + quoted(broken) + " load");
    EXPECT_EQ(bad.status, 1);
    EXPECT_NE(bad.err.find("line 1, column 7"), std::string::npos) << bad.err;
}

TEST(Cli, ThresholdOverrides) {
    TempDir dir;
    const std::string cfg = dir.file("t.conf");
    std::ofstream(cfg) << "temperature = 0.5\n";
    const std::string trace = dir.file("trace.jsonl");
    // A 20 -> 23 step: 0.15 is above the default 0.1 but below 0.5.
    {
        std::ofstream out(trace);
        EnvironmentReading r;
        r.humidity = 30;
        r.temperature = 20;
        r.illumination = 400;
        r.date = Date{2007, 4, 11};
        r.time = TimeOfDay{9, 0, 0};
        out << wire::encode(r) << '\n';
        r.time = TimeOfDay{9, 0, 1};
        r.temperature = 23;
        out << wire::encode(r) << '\n';
    }
    EXPECT_NE(run("replay " + quoted(trace)).out.find("stored_count=2"), std::string::npos);
    EXPECT_NE(run("--thresholds " + quoted(cfg) + " replay " + quoted(trace)).out.find("stored_count=1"),
              std::string::npos);
}

TEST(Cli, ServeAcceptsReadingsAndReportsOnTermination) {
    namespace asio = boost::asio;
    testing::ServeProcess serve({"--data", testing::fixture_path()});
    ASSERT_NE(serve.port(), 0);

    asio::io_context io;
    asio::ip::tcp::socket socket(io);
    socket.connect({asio::ip::make_address("127.0.0.1"), serve.port()});
    EnvironmentReading r;
    r.humidity = 30;
    r.temperature = 20;
    r.illumination = 400;
    r.date = Date{2007, 4, 11};
    r.time = TimeOfDay{18, 0, 0};
    r.persons_present = {Term::home("Son")};
    asio::write(socket, asio::buffer(wire::encode(r) + "\n"));
    asio::streambuf buf;
    std::vector<std::string> replies;
    for (int i = 0; i < 5; ++i) {
        const std::size_t n = asio::read_until(socket, buf, '\n');
        replies.emplace_back(asio::buffers_begin(buf.data()), asio::buffers_begin(buf.data()) + n - 1);
        buf.consume(n);
    }
    EXPECT_NE(replies[0].find(R"("type":"ack")"), std::string::npos);
    EXPECT_NE(replies[4].find(R"("appliance":"TV","state":false)"), std::string::npos);
    socket.close();

    const auto [status, tail] = serve.stop();
    EXPECT_EQ(status, 0);
    EXPECT_EQ(tail, "input_count=1\nstored_count=1\nreduction_factor=1\ncommands_emitted=4\n");
}

}  // namespace
}  // namespace homectx
