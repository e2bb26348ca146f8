#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cqsync/bench/workloads.hpp"

int main(int argc, char** argv) {
    cqs::bench::BenchConfig c;
    std::string threads = "1,2,4,8";
    std::string out;

    CLI::App app{"Throughput of the cqsync primitives and baseline queue locks"};
    app.add_option("--primitive", c.primitive, "Workload to run")
        ->check(CLI::IsMember(cqs::bench::primitives()))
        ->capture_default_str();
    app.add_option("--threads", threads, "Comma-separated thread counts")->capture_default_str();
    app.add_option("--param", c.param, "Permits (semaphore) or shared elements (pools)")->capture_default_str();
    app.add_option("--work-in", c.work_in, "Mean spin iterations before each operation")->capture_default_str();
    app.add_option("--work-out", c.work_out, "Mean spin iterations after each operation")->capture_default_str();
    app.add_option("--ops", c.ops, "Operations per measured iteration")->capture_default_str();
    app.add_option("--seed", c.seed, "Seed for the work distributions")->capture_default_str();
    app.add_option("--iterations", c.iterations, "Measured iterations per point")->capture_default_str();
    app.add_option("--out", out, "Write CSV here instead of stdout");
    CLI11_PARSE(app, argc, argv);

    c.threads.clear();
    std::stringstream ss(threads);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            int n = std::stoi(item);
            if (n < 1) throw std::out_of_range(item);
            c.threads.push_back(n);
        } catch (const std::exception&) {
            std::cerr << "cqsync-bench: bad thread count '" << item << "'\n";
            return 2;
        }
    }
    if (c.ops == 0) {
        std::cerr << "cqsync-bench: --ops must be positive\n";
        return 2;
    }

    std::ofstream file;
    std::ostream* sink = &std::cout;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "cqsync-bench: cannot write " << out << "\n";
            return 2;
        }
        sink = &file;
    }
    *sink << cqs::bench::csv_header() << '\n';
    for (int t : c.threads) {
        *sink << cqs::bench::csv_row(cqs::bench::run_point(c, t)) << '\n';
        sink->flush();
    }
    return 0;
}
