#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqsync/harness/scenario.hpp"

using namespace cqs::check;

namespace {

int count_cancels(const ScenarioConfig& s) {
    int n = 0;
    for (const auto& t : s.threads) {
        for (const auto& op : t) n += op.find("cancel") != std::string::npos;
    }
    return n;
}

int count_ops(const ScenarioConfig& s) {
    int n = 0;
    for (const auto& t : s.threads) n += static_cast<int>(t.size());
    return n;
}

std::set<std::vector<std::string>> thread_pair(const ScenarioConfig& s) {
    std::set<std::vector<std::string>> out;
    for (const auto& t : s.threads) out.insert(t);
    return out;
}

Verdict run(const ScenarioConfig& s) {
    ExploreOptions o;
    o.preemption_bound = s.preemption_bound;
    return explore(make_program(s), o);
}

}  // namespace

TEST_CASE("a scenario survives a trip through JSON") {
    ScenarioConfig s;
    s.name = "round trip";
    s.primitive = "semaphore";
    s.resume_mode = "sync";
    s.cancellation_mode = "simple";
    s.param = 3;
    s.segment_size = 5;
    s.max_spin_cycles = 7;
    s.preemption_bound = -1;
    s.expect_violation = true;
    s.threads = {{"acquire", "release"}, {"acquire-cancel"}, {}};
    ScenarioConfig r = parse_scenario(to_json(s));
    CHECK(r.name == s.name);
    CHECK(r.primitive == s.primitive);
    CHECK(r.resume_mode == s.resume_mode);
    CHECK(r.cancellation_mode == s.cancellation_mode);
    CHECK(r.param == s.param);
    CHECK(r.segment_size == s.segment_size);
    CHECK(r.max_spin_cycles == s.max_spin_cycles);
    CHECK(r.preemption_bound == s.preemption_bound);
    CHECK(r.expect_violation == s.expect_violation);
    CHECK(r.threads == s.threads);
}

TEST_CASE("missing fields take their defaults") {
    ScenarioConfig r = parse_scenario(R"({"threads": [["lock", "unlock"]]})");
    ScenarioConfig d;
    CHECK(r.primitive == d.primitive);
    CHECK(r.segment_size == d.segment_size);
    CHECK(r.preemption_bound == d.preemption_bound);
    CHECK_FALSE(r.expect_violation);
}

TEST_CASE("malformed scenarios are rejected") {
    CHECK_THROWS(parse_scenario("{}"));
    CHECK_THROWS(parse_scenario(R"({"threads": []})"));
    CHECK_THROWS(parse_scenario(R"({"threads": [["lock"]], "segment_size": 0})"));
    CHECK_THROWS(parse_scenario("not json"));
    CHECK_THROWS(load_scenario("/nonexistent/scenario.json"));

    ScenarioConfig s;
    s.threads = {{"lock"}};
    s.primitive = "spinlock";
    CHECK_THROWS_AS(make_program(s), std::invalid_argument);
    s.primitive = "mutex";
    s.resume_mode = "eventually";
    CHECK_THROWS_AS(make_program(s), std::invalid_argument);
}

TEST_CASE("an unknown operation is rejected before any run") {
    ScenarioConfig s;
    s.primitive = "latch";
    s.threads = {{"count-down", "jump"}};
    CHECK_THROWS_WITH_AS(make_program(s), doctest::Contains("jump"), std::invalid_argument);
}

TEST_CASE("describe names the primitive, its options and every thread") {
    ScenarioConfig s;
    s.primitive = "mutex";
    s.threads = {{"lock", "unlock"}, {"lock-cancel"}};
    std::string d = describe(s);
    CHECK(d.find("mutex") != std::string::npos);
    CHECK(d.find("async/smart") != std::string::npos);
    CHECK(d.find("T0") != std::string::npos);
    CHECK(d.find("T1") != std::string::npos);
    CHECK(d.find("lock-cancel") != std::string::npos);
}

TEST_CASE("every scenario file gives its expected verdict") {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(CQSYNC_SCENARIO_DIR)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    REQUIRE(files.size() >= 10);
    int violations = 0;
    for (const auto& f : files) {
        CAPTURE(f.string());
        ScenarioConfig s = load_scenario(f.string());
        Verdict v = run(s);
        INFO(v.failure);
        CHECK(v.passed != s.expect_violation);
        if (!s.expect_violation) CHECK(v.complete);
        violations += s.expect_violation;
    }
    CHECK(violations == 2);
}

TEST_CASE("enumerated scenarios have two threads, bounded size and one cancellation") {
    for (const auto& fam : standard_families()) {
        CAPTURE(fam.label);
        auto all = enumerate_scenarios(fam, 6);
        CHECK_FALSE(all.empty());
        std::set<std::string> names;
        for (const auto& s : all) {
            CHECK(s.threads.size() == 2);
            CHECK(count_ops(s) <= 6);
            CHECK(count_cancels(s) == 1);
            CHECK(s.primitive == fam.base.primitive);
            CHECK(s.preemption_bound == fam.base.preemption_bound);
            names.insert(s.name);
        }
        CHECK(names.size() == all.size());
    }
}

TEST_CASE("enumeration is deterministic and matches a hand count") {
    for (const auto& fam : standard_families()) {
        CAPTURE(fam.label);
        auto a = enumerate_scenarios(fam, 6);
        auto b = enumerate_scenarios(fam, 6);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].name == b[i].name);
    }
    // Mutex without try-lock: blocks L = lock,unlock and C = lock-cancel,unlock.
    // Within six operations the unordered pairs are {C,L}, {C,LL}, {CL,L}, {LC,L}.
    Family async_mutex;
    async_mutex.base.primitive = "mutex";
    async_mutex.base.resume_mode = "async";
    CHECK(enumerate_scenarios(async_mutex, 6).size() == 4);
}

TEST_CASE("a smaller operation budget gives a subset of scenarios") {
    for (const auto& fam : standard_families()) {
        CAPTURE(fam.label);
        auto small = enumerate_scenarios(fam, 4);
        auto large = enumerate_scenarios(fam, 6);
        CHECK(small.size() <= large.size());
        std::set<std::set<std::vector<std::string>>> pairs;
        for (const auto& s : large) pairs.insert(thread_pair(s));
        for (const auto& s : small) CHECK(pairs.count(thread_pair(s)) == 1);
    }
}

TEST_CASE("the families cover every primitive in every mode") {
    std::set<std::string> primitives;
    std::set<std::string> mutex_modes;
    for (const auto& f : standard_families()) {
        primitives.insert(f.base.primitive);
        if (f.base.primitive == "mutex") mutex_modes.insert(f.base.resume_mode + "/" + f.base.cancellation_mode);
    }
    for (const char* p : {"mutex", "semaphore", "barrier", "latch", "pool-queue", "pool-stack", "future"}) {
        CHECK(primitives.count(p) == 1);
    }
    CHECK(mutex_modes.size() == 4);
}

TEST_CASE("small mutex and semaphore families pass exhaustively") {
    for (const auto& fam : standard_families()) {
        if (fam.base.primitive != "mutex" && fam.base.primitive != "semaphore") continue;
        for (auto s : enumerate_scenarios(fam, 4)) {
            CAPTURE(s.name);
            s.preemption_bound = 3;
            Verdict v = run(s);
            INFO(v.failure);
            INFO(format_trace(v.counterexample));
            CHECK(v.passed);
            CHECK(v.complete);
        }
    }
}

TEST_CASE("the race scenarios pair each broken fixture with its repaired twin") {
    auto races = race_scenarios();
    REQUIRE(races.size() == 4);
    std::set<std::string> fixtures;
    for (const auto& s : races) {
        if (s.expect_violation) fixtures.insert(s.primitive);
    }
    CHECK(fixtures == std::set<std::string>{"naive-smart-mutex", "async-trylock-mutex"});
    for (std::size_t i = 0; i + 1 < races.size(); i += 2) {
        CHECK(races[i].threads == races[i + 1].threads);
        CHECK(races[i].expect_violation);
        CHECK_FALSE(races[i + 1].expect_violation);
    }
}
