#include "pagelab/cli.hpp"

#include "pagelab/codec.hpp"
#include "pagelab/tape.hpp"
#include "pagelab/tracer.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <unordered_set>

namespace fs = std::filesystem;

namespace pagelab
{

namespace
{

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void ensure_parent(std::string const & path)
{
    auto parent = fs::path(path).parent_path();
    if (!parent.empty())
        fs::create_directories(parent);
}

Tape auto_tape(SimulateOptions const & o, AccessStream const & stream, std::uint64_t local_pages)
{
    auto spec_key = nlohmann::json(o.spec).dump() + "|ms=" + std::to_string(o.microset_size) +
                    "|q=" + std::to_string(o.config.interleaving_quantum);
    auto dir = fs::path(output_path(o.cache_dir));
    fs::create_directories(dir);
    auto trace_file = dir / ("trace-" + hex64(fnv1a(spec_key)) + ".3pot");
    auto tape_file =
        dir / ("tape-" + hex64(fnv1a(spec_key + "|c=" + std::to_string(local_pages))) + ".3pop");

    if (fs::exists(tape_file))
        return load_tape(tape_file.string());
    Trace trace;
    if (fs::exists(trace_file)) {
        trace = load_trace(trace_file.string());
    } else {
        trace = trace_multithread(stream, o.microset_size, o.config.interleaving_quantum);
        save_trace(trace_file.string(), trace);
    }
    auto tape = make_tapes_multithread(trace, local_pages, static_cast<std::uint32_t>(trace.thread_count()));
    save_tape(tape_file.string(), tape);
    return tape;
}

} // namespace

double parse_latency(std::string_view text)
{
    if (text == "25gb")
        return 5.0;
    if (text == "10gb0")
        return 5.5;
    if (text == "10gb4")
        return 15.2;
    if (text == "56gb")
        return 3.4;
    std::string s(text);
    char * end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !(v >= 0.0))
        throw InvalidParameter("bad latency '" + s + "': expected microseconds or 25gb, 10gb0, 10gb4, 56gb");
    return v;
}

std::string output_path(std::string const & path)
{
    char const * dir = std::getenv(kOutputDirEnv);
    if (!dir || !*dir || fs::path(path).is_absolute())
        return path;
    return (fs::path(dir) / path).string();
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

GenResult cmd_gen(WorkloadSpec const & spec, std::string const & out)
{
    auto stream = gen_stream(spec);
    GenResult r;
    r.threads = stream.thread_count();
    r.accesses = stream.total_accesses();
    r.footprint_pages = footprint_pages(stream);
    r.regions = layout_regions(spec);
    if (!out.empty()) {
        auto path = output_path(out);
        ensure_parent(path);
        std::ofstream f(path);
        if (!f)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        for (auto const & thread : stream.per_thread) {
            for (std::size_t i = 0; i < thread.size(); ++i)
                f << (i ? " " : "") << thread[i].value;
            f << '\n';
        }
        if (!f)
            throw std::runtime_error("write failed: " + path);
    }
    return r;
}

TraceResult cmd_trace(WorkloadSpec const & spec, std::uint32_t microset_size,
                      std::uint64_t interleaving_quantum, std::string const & out)
{
    auto stream = gen_stream(spec);
    auto trace = trace_multithread(stream, microset_size, interleaving_quantum);
    auto path = output_path(out);
    ensure_parent(path);
    save_trace(path, trace);

    TraceResult r;
    r.fault_count = trace.fault_count;
    r.file_bytes = fs::file_size(path);
    for (auto const & thread : trace.per_thread)
        r.microsets += thread.size();
    return r;
}

PostprocessResult cmd_postprocess(std::string const & trace_path, std::optional<double> ratio,
                                  std::optional<std::uint64_t> pages, std::string const & out)
{
    if (ratio.has_value() == pages.has_value())
        throw InvalidParameter("give exactly one of a memory ratio and a page count");
    if (ratio && !(*ratio > 0.0 && *ratio <= 1.0))
        throw InvalidParameter("memory ratio must lie in (0, 1]");

    PostprocessResult r;
    std::uint32_t threads = 1;
    {
        std::ifstream in(trace_path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open '" + trace_path + "' for reading");
        TraceReader reader(in);
        threads = std::max<std::uint32_t>(1, reader.thread_count());
        std::unordered_set<PageId> seen;
        Microset ms;
        while (reader.next_thread()) {
            while (reader.next_microset(ms))
                seen.insert(ms.begin(), ms.end());
        }
        r.trace_pages = seen.size();
    }
    r.target_pages = ratio ? local_pages_for_ratio(*ratio, r.trace_pages) : *pages;
    r.per_thread_capacity = per_thread_capacity(r.target_pages, threads);

    std::ifstream in(trace_path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + trace_path + "' for reading");
    auto tape = postprocess_stream(in, r.target_pages);
    for (auto const & thread : tape.per_thread)
        r.tape_lengths.push_back(thread.size());

    auto path = output_path(out);
    ensure_parent(path);
    save_tape(path, tape);
    return r;
}

SimReport cmd_simulate(SimulateOptions const & o)
{
    auto stream = gen_stream(o.spec);
    auto config = o.config;
    if (o.local_ratio) {
        if (!(*o.local_ratio > 0.0 && *o.local_ratio <= 1.0))
            throw InvalidParameter("memory ratio must lie in (0, 1]");
        config.local_pages = local_pages_for_ratio(*o.local_ratio, footprint_pages(stream));
    }
    config.validate();

    if (!policy_uses_tape(o.policy))
        return run_sim(stream, make_policy(o.policy, config), config);

    Tape tape;
    if (o.tape_path)
        tape = load_tape(*o.tape_path);
    else if (o.auto_tape)
        tape = auto_tape(o, stream, config.local_pages);
    else
        throw InvalidParameter("the threepo policy needs --tape or --auto");
    if (tape.thread_count() != stream.thread_count())
        throw InvalidParameter("tape has " + std::to_string(tape.thread_count()) +
                               " threads but the workload has " + std::to_string(stream.thread_count()));
    return run_sim(stream, make_policy(o.policy, config, &tape), config);
}

SweepResult cmd_sweep(SweepSpec const & spec, bool serial)
{
    SweepResult r;
    r.rows = serial ? run_sweep_serial(spec) : run_sweep_parallel(spec);
    auto dir = fs::path(output_path(spec.output_dir));
    fs::create_directories(dir);
    r.csv_path = (dir / "sweep.csv").string();
    std::ofstream out(r.csv_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + r.csv_path + "' for writing");
    write_sweep_csv(out, r.rows);
    if (!out)
        throw std::runtime_error("write failed: " + r.csv_path);
    return r;
}

Comparison compare_reports(SimReport const & a, SimReport const & b)
{
    if (a.total_us <= 0.0 || b.total_us <= 0.0)
        throw InvalidParameter("cannot compare reports with a zero runtime");
    Comparison c;
    c.speedup = b.total_us / a.total_us;
    if (b.majors > 0)
        c.major_ratio = static_cast<double>(a.majors) / static_cast<double>(b.majors);
    c.major_difference = static_cast<std::int64_t>(b.majors) - static_cast<std::int64_t>(a.majors);
    return c;
}

void print_comparison(std::ostream & out, SimReport const & a, SimReport const & b, Comparison const & c)
{
    char line[256];
    std::snprintf(line, sizeof line, "A %-9s total_us=%.3f majors=%llu\n", a.policy.c_str(), a.total_us,
                  static_cast<unsigned long long>(a.majors));
    out << line;
    std::snprintf(line, sizeof line, "B %-9s total_us=%.3f majors=%llu\n", b.policy.c_str(), b.total_us,
                  static_cast<unsigned long long>(b.majors));
    out << line;
    std::snprintf(line, sizeof line, "speedup=%.4f\n", c.speedup);
    out << line;
    if (c.major_ratio) {
        std::snprintf(line, sizeof line, "major_ratio=%.6f\n", *c.major_ratio);
        out << line;
    } else {
        out << "major_ratio=n/a\n";
    }
}

SimReport load_report(std::string const & path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "' for reading");
    try {
        return nlohmann::json::parse(in).get<SimReport>();
    } catch (nlohmann::json::exception const & e) {
        throw FormatError("invalid report '" + path + "': " + e.what());
    }
}

void save_report(std::string const & path, SimReport const & report)
{
    ensure_parent(path);
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << nlohmann::json(report).dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

AuditResult cmd_audit(SimulateOptions const & options)
{
    auto o = options;
    o.config.audit = true;
    AuditResult r;
    SimReport first;
    SimReport second;
    try {
        first = cmd_simulate(o);
        second = cmd_simulate(o);
    } catch (AuditFailure const & e) {
        r.problems.push_back(std::string("audit: ") + e.what());
        return r;
    }

    auto sum = first.hits + first.minors + first.delayed_hits + first.majors;
    if (sum != first.accesses)
        r.problems.push_back("access classes sum to " + std::to_string(sum) + ", expected " +
                             std::to_string(first.accesses));
    std::uint64_t thread_sum = 0;
    for (auto const & t : first.per_thread) {
        thread_sum += t.accesses;
        if (t.hits + t.minors + t.delayed_hits + t.majors != t.accesses)
            r.problems.push_back("a thread's access classes do not sum to its accesses");
    }
    if (thread_sum != first.accesses)
        r.problems.push_back("per-thread accesses do not sum to the total");
    if (nlohmann::json(first).dump() != nlohmann::json(second).dump())
        r.problems.push_back("two runs produced different reports");
    r.passed = r.problems.empty();
    return r;
}

} // namespace pagelab
