// pagelab: workload generation, tracing, tape post-processing and paging simulation.

#include "pagelab/cli.hpp"
#include "pagelab/codec.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace pagelab;

namespace
{

struct SimFlags
{
    std::string spec_path;
    std::string policy = "none";
    std::string config_path;
    std::optional<std::string> tape_path;
    bool auto_tape = false;
    std::uint32_t microset_size = 1024;
    std::optional<double> local_ratio;
    std::optional<std::uint64_t> local_pages;
    std::optional<std::string> latency;
    std::optional<double> link_gbps;
    std::optional<std::uint32_t> batch_size;
    std::optional<std::uint32_t> lookahead;
    std::optional<std::uint32_t> readahead_window;
    std::optional<std::uint64_t> quantum;
};

void add_sim_flags(CLI::App * cmd, SimFlags & f)
{
    cmd->add_option("spec", f.spec_path, "Workload spec (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--policy", f.policy, "none, readahead, stride or threepo")
        ->check(CLI::IsMember({"none", "readahead", "stride", "threepo"}));
    cmd->add_option("--config", f.config_path, "SimConfig JSON; flags override it")->check(CLI::ExistingFile);
    cmd->add_option("--tape", f.tape_path, "Tape file for threepo")->check(CLI::ExistingFile);
    cmd->add_flag("--auto", f.auto_tape, "Trace and post-process on demand, cached by spec hash");
    cmd->add_option("--microset-size", f.microset_size, "Microset size for --auto")->capture_default_str();
    cmd->add_option("--local-ratio", f.local_ratio, "Local memory as a fraction of the footprint");
    cmd->add_option("--local-pages", f.local_pages, "Local memory in pages");
    cmd->add_option("--latency-us", f.latency, "Fetch latency in us, or 25gb, 10gb0, 10gb4, 56gb");
    cmd->add_option("--link-gbps", f.link_gbps, "Link bandwidth; 0 is unlimited");
    cmd->add_option("--batch-size", f.batch_size, "Tape entries between key pages (default 100)");
    cmd->add_option("--lookahead", f.lookahead, "Tape entries fetched past the key page (default 400)");
    cmd->add_option("--readahead-window", f.readahead_window, "Readahead and stride window");
    cmd->add_option("--quantum", f.quantum, "Accesses per thread turn");
}

SimulateOptions to_options(SimFlags const & f)
{
    SimulateOptions o;
    o.spec = load_workload_spec(f.spec_path);
    o.policy = f.policy;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        from_json(nlohmann::json::parse(in), o.config);
    }
    if (f.local_pages)
        o.config.local_pages = *f.local_pages;
    if (f.local_ratio)
        o.local_ratio = f.local_ratio;
    else if (!f.local_pages && f.config_path.empty())
        o.local_ratio = 1.0;
    if (f.latency)
        o.config.fetch_latency_us = parse_latency(*f.latency);
    if (f.link_gbps)
        o.config.link_gbps = *f.link_gbps;
    if (f.batch_size)
        o.config.batch_size = *f.batch_size;
    if (f.lookahead)
        o.config.lookahead = *f.lookahead;
    if (f.readahead_window)
        o.config.readahead_window = *f.readahead_window;
    if (f.quantum)
        o.config.interleaving_quantum = *f.quantum;
    o.tape_path = f.tape_path;
    o.auto_tape = f.auto_tape;
    o.microset_size = f.microset_size;
    return o;
}

void print_summary(SimReport const & r)
{
    std::printf("policy=%s local_pages=%llu accesses=%llu hits=%llu minors=%llu delayed=%llu majors=%llu "
                "total_us=%.3f\n",
                r.policy.c_str(), static_cast<unsigned long long>(r.local_pages),
                static_cast<unsigned long long>(r.accesses), static_cast<unsigned long long>(r.hits),
                static_cast<unsigned long long>(r.minors), static_cast<unsigned long long>(r.delayed_hits),
                static_cast<unsigned long long>(r.majors), r.total_us);
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Far-memory paging lab: trace, post-process and simulate prefetching"};
    app.require_subcommand(1);

    // gen
    std::string gen_spec, gen_out;
    auto * gen = app.add_subcommand("gen", "Generate a workload's access stream and summarize it");
    gen->add_option("spec", gen_spec, "Workload spec (JSON)")->required()->check(CLI::ExistingFile);
    gen->add_option("-o,--out", gen_out, "Write page ids, one line per thread");

    // trace
    std::string trace_spec, trace_out, dump_path;
    std::uint32_t trace_ms = 1024;
    std::uint64_t trace_quantum = SimConfig{}.interleaving_quantum;
    auto * trace = app.add_subcommand("trace", "Record a microset trace of a workload");
    trace->add_option("spec", trace_spec, "Workload spec (JSON)")->check(CLI::ExistingFile);
    trace->add_option("-o,--out", trace_out, "Trace file to write");
    trace->add_option("--microset-size", trace_ms, "Pages per microset")->capture_default_str();
    trace->add_option("--quantum", trace_quantum, "Accesses per thread turn")->capture_default_str();
    auto * dump = trace->add_subcommand("dump", "Print a trace file as text");
    dump->add_option("file", dump_path, "Trace file")->required()->check(CLI::ExistingFile);

    // postprocess
    std::string pp_trace, pp_out;
    std::optional<double> pp_ratio;
    std::optional<std::uint64_t> pp_pages;
    auto * post = app.add_subcommand("postprocess", "Turn a trace into a tape for a memory size");
    post->add_option("trace", pp_trace, "Trace file")->required()->check(CLI::ExistingFile);
    post->add_option("-o,--out", pp_out, "Tape file to write")->required();
    auto * ratio_opt = post->add_option("--local-ratio", pp_ratio, "Fraction of the trace's distinct pages");
    auto * pages_opt = post->add_option("--pages", pp_pages, "Target memory in pages");
    ratio_opt->excludes(pages_opt);

    // simulate
    SimFlags sim_flags;
    std::string sim_out;
    auto * sim = app.add_subcommand("simulate", "Simulate a workload under a prefetch policy");
    add_sim_flags(sim, sim_flags);
    sim->add_option("-o,--out", sim_out, "Report JSON to write (default: stdout)");

    // sweep
    std::string sweep_path, sweep_dir;
    bool sweep_serial = false;
    auto * sweep = app.add_subcommand("sweep", "Run a grid of simulations and write sweep.csv");
    sweep->add_option("spec", sweep_path, "Sweep spec (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--output-dir", sweep_dir, "Directory for sweep.csv");
    sweep->add_flag("--serial", sweep_serial, "Run cells one at a time");

    // compare
    std::string cmp_a, cmp_b;
    auto * compare = app.add_subcommand("compare", "Speedup and fault ratio of report A over report B");
    compare->add_option("a", cmp_a, "Report A")->required()->check(CLI::ExistingFile);
    compare->add_option("b", cmp_b, "Report B")->required()->check(CLI::ExistingFile);

    // audit
    SimFlags audit_flags;
    auto * audit = app.add_subcommand("audit", "Simulate with invariant checks; nonzero exit on failure");
    add_sim_flags(audit, audit_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            auto r = cmd_gen(load_workload_spec(gen_spec), gen_out);
            std::printf("threads=%zu accesses=%llu footprint_pages=%llu\n", r.threads,
                        static_cast<unsigned long long>(r.accesses),
                        static_cast<unsigned long long>(r.footprint_pages));
            for (auto const & region : r.regions)
                std::printf("region %s base=%llu pages=%llu\n", region.name.c_str(),
                            static_cast<unsigned long long>(region.base.value),
                            static_cast<unsigned long long>(region.pages));
        } else if (dump->parsed()) {
            dump_trace(std::cout, load_trace(dump_path));
        } else if (trace->parsed()) {
            if (trace_spec.empty() || trace_out.empty())
                throw CLI::RequiredError("trace needs a spec and --out");
            auto r = cmd_trace(load_workload_spec(trace_spec), trace_ms, trace_quantum, trace_out);
            std::printf("fault_count=%llu microsets=%zu bytes=%llu\n",
                        static_cast<unsigned long long>(r.fault_count), r.microsets,
                        static_cast<unsigned long long>(r.file_bytes));
        } else if (post->parsed()) {
            if (!pp_ratio && !pp_pages)
                throw CLI::RequiredError("postprocess needs --local-ratio or --pages");
            auto r = cmd_postprocess(pp_trace, pp_ratio, pp_pages, pp_out);
            std::printf("target_pages=%llu trace_pages=%llu per_thread_capacity=%llu tape_lengths=",
                        static_cast<unsigned long long>(r.target_pages),
                        static_cast<unsigned long long>(r.trace_pages),
                        static_cast<unsigned long long>(r.per_thread_capacity));
            for (std::size_t i = 0; i < r.tape_lengths.size(); ++i)
                std::printf("%s%llu", i ? "," : "", static_cast<unsigned long long>(r.tape_lengths[i]));
            std::printf("\n");
        } else if (sim->parsed()) {
            auto report = cmd_simulate(to_options(sim_flags));
            if (sim_out.empty()) {
                std::cout << nlohmann::json(report).dump(2) << '\n';
            } else {
                save_report(output_path(sim_out), report);
                print_summary(report);
            }
        } else if (sweep->parsed()) {
            auto spec = load_sweep_spec(sweep_path);
            if (!sweep_dir.empty())
                spec.output_dir = sweep_dir;
            auto r = cmd_sweep(spec, sweep_serial);
            std::printf("rows=%zu csv=%s\n", r.rows.size(), r.csv_path.c_str());
        } else if (compare->parsed()) {
            auto a = load_report(cmp_a);
            auto b = load_report(cmp_b);
            print_comparison(std::cout, a, b, compare_reports(a, b));
        } else if (audit->parsed()) {
            auto r = cmd_audit(to_options(audit_flags));
            for (auto const & p : r.problems)
                std::fprintf(stderr, "audit: %s\n", p.c_str());
            std::printf("audit %s\n", r.passed ? "passed" : "FAILED");
            return r.passed ? 0 : 1;
        }
    } catch (CLI::Error const & e) {
        return app.exit(e);
    } catch (std::exception const & e) {
        std::fprintf(stderr, "pagelab: %s\n", e.what());
        return 2;
    }
    return 0;
}
