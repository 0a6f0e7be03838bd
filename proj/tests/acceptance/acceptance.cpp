// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oracles.hpp"

#include "pagelab/runtime.hpp"
#include "pagelab/sweep.hpp"
#include "pagelab/tape.hpp"
#include "pagelab/tracer.hpp"
#include "pagelab/workload.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

using namespace pagelab;

namespace
{

// Pinned limits and tolerances.
constexpr double kZeroMajorBudgetSec = 10.0;
constexpr double kRandomBudgetSec = 30.0;
constexpr double kMajorRatioLimit = 1.0 / 100.0;
constexpr double kLatencyTrendTolerance = 0.01;
constexpr int kInclusionTraces = 1000;
constexpr std::size_t kMaxTraceAccesses = 10'000;
constexpr int kOracleStreams = 300;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

WorkloadSpec make(WorkloadKind kind, std::vector<std::uint64_t> dims, std::uint64_t epp,
                  std::uint32_t threads = 1, std::uint64_t seed = 0)
{
    WorkloadSpec s;
    s.kind = kind;
    s.dims = std::move(dims);
    s.elements_per_page = epp;
    s.threads = threads;
    s.seed = seed;
    return s;
}

Tape tape_for(AccessStream const & s, std::uint64_t target, std::uint32_t microset, std::uint64_t quantum)
{
    auto trace = trace_multithread(s, microset, quantum);
    return make_tapes_multithread(trace, target, static_cast<std::uint32_t>(s.thread_count()));
}

// The conditions of the zero-major guarantee: default batch and lookahead, unlimited link.
SimConfig guarantee_config(std::uint64_t capacity)
{
    SimConfig c;
    c.local_pages = capacity;
    c.batch_size = 100;
    c.lookahead = 400;
    c.fetch_latency_us = 5.0;
    c.link_gbps = 0;
    return c;
}

// Every simulation of the suite goes through here so criterion 8 can audit it.
struct Ledger
{
    std::uint64_t runs = 0;
    std::uint64_t conservation_failures = 0;
    std::uint64_t determinism_failures = 0;

    SimReport run(AccessStream const & s, PrefetchPolicy const & p, SimConfig const & c)
    {
        auto a = run_sim(s, p, c);
        auto b = run_sim(s, p, c);
        ++runs;
        if (nlohmann::json(a).dump() != nlohmann::json(b).dump())
            ++determinism_failures;
        bool ok = a.hits + a.minors + a.delayed_hits + a.majors == a.accesses &&
                  a.accesses == s.total_accesses();
        std::uint64_t sum = 0;
        for (auto const & t : a.per_thread) {
            ok = ok && t.hits + t.minors + t.delayed_hits + t.majors == t.accesses;
            sum += t.accesses;
        }
        if (!ok || sum != a.accesses)
            ++conservation_failures;
        return a;
    }
};

Ledger ledger;
int failures = 0;

void report(int id, bool pass, std::string const & title, std::string const & detail)
{
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(char const * f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void guarded(int id, std::string const & title, std::function<void()> const & body)
{
    try {
        body();
    } catch (std::exception const & e) {
        report(id, false, title, std::string("exception: ") + e.what());
    }
}

void criterion_zero_majors()
{
    auto title = "matmul with matching tape at 20% memory has no majors and no delayed hits";
    guarded(1, title, [&] {
        auto start = Clock::now();
        auto s = gen_stream(make(WorkloadKind::MatMul, {105}, 8));
        auto fp = footprint_pages(s);
        auto cap = local_pages_for_ratio(0.2, fp);
        auto c = guarantee_config(cap);
        auto r = ledger.run(s, ThreePoPolicy{tape_for(s, cap, 1024, c.interleaving_quantum)}, c);
        auto secs = seconds_since(start);
        report(1, fp >= 4096 && r.majors == 0 && r.delayed_hits == 0 && secs < kZeroMajorBudgetSec, title,
               fmt("footprint=%llu C=%llu accesses=%llu majors=%llu delayed=%llu %.2fs",
                   (unsigned long long)fp, (unsigned long long)cap, (unsigned long long)r.accesses,
                   (unsigned long long)r.majors, (unsigned long long)r.delayed_hits, secs));
    });
}

void criterion_fault_ratio()
{
    auto title = "random oblivious workload at 30% memory: tape majors <= readahead majors / 100";
    guarded(2, title, [&] {
        auto start = Clock::now();
        auto s = gen_stream(make(WorkloadKind::RandomOblivious, {20000, 3}, 1, 1, 7));
        SimConfig c;
        c.local_pages = local_pages_for_ratio(0.3, footprint_pages(s));
        auto tape = ledger.run(s, ThreePoPolicy{tape_for(s, c.local_pages, 1024, c.interleaving_quantum)}, c);
        auto ra = ledger.run(s, ReadaheadPolicy{c.readahead_window}, c);
        auto secs = seconds_since(start);
        bool pass = static_cast<double>(tape.majors) <= kMajorRatioLimit * static_cast<double>(ra.majors) &&
                    secs < kRandomBudgetSec;
        report(2, pass, title,
               fmt("tape=%llu readahead=%llu ratio=%.5f %.2fs", (unsigned long long)tape.majors,
                   (unsigned long long)ra.majors,
                   ra.majors ? double(tape.majors) / double(ra.majors) : 0.0, secs));
    });
}

void criterion_latency_trend()
{
    auto title = "tape speedup over readahead at 15.2 us >= speedup at 5.0 us on a dot product";
    guarded(3, title, [&] {
        auto s = gen_stream(make(WorkloadKind::DotProd, {200000}, 64));
        SimConfig c;
        c.local_pages = local_pages_for_ratio(0.2, footprint_pages(s));
        auto tape = tape_for(s, c.local_pages, 1024, c.interleaving_quantum);
        auto speedup = [&](double latency) {
            c.fetch_latency_us = latency;
            auto a = ledger.run(s, ThreePoPolicy{tape}, c);
            auto b = ledger.run(s, ReadaheadPolicy{c.readahead_window}, c);
            return b.total_us / a.total_us;
        };
        auto low = speedup(5.0);
        auto high = speedup(15.2);
        report(3, high >= low * (1.0 - kLatencyTrendTolerance), title,
               fmt("speedup@5.0=%.4f speedup@15.2=%.4f", low, high));
    });
}

void criterion_inclusion()
{
    auto title = "tape(M) is a subsequence of tape(M-k) on random traces, checked against brute-force LRU";
    guarded(4, title, [&] {
        std::mt19937_64 rng(0x5eed);
        std::uint64_t pairs = 0, bad_oracle = 0, bad_inclusion = 0;
        for (int i = 0; i < kInclusionTraces; ++i) {
            auto length = 1 + rng() % kMaxTraceAccesses;
            auto stream = oracle::random_stream(rng, length, 2 + rng() % 300);
            auto trace = trace_stream(oracle::to_ids(stream), static_cast<std::uint32_t>(1 + rng() % 16));
            auto flat = trace.flattened(0);
            auto m = 2 + rng() % 64;
            auto big = oracle::to_values(make_tape(trace, m).per_thread[0]);
            if (big != oracle::lru_misses(oracle::to_values(flat), m))
                ++bad_oracle;
            for (int sample = 0; sample < 3; ++sample) {
                auto k = 1 + rng() % (m - 1);
                auto small = oracle::lru_misses(oracle::to_values(flat), m - k);
                ++pairs;
                if (!oracle::is_subsequence(big, small))
                    ++bad_inclusion;
            }
        }
        report(4, bad_oracle == 0 && bad_inclusion == 0, title,
               fmt("traces=%d pairs=%llu oracle_mismatch=%llu inclusion_violations=%llu", kInclusionTraces,
                   (unsigned long long)pairs, (unsigned long long)bad_oracle,
                   (unsigned long long)bad_inclusion));
    });
}

void criterion_tracer_oracle()
{
    auto title = "tracer output equals the brute-force interpreter for microset sizes 1, 2, 7, 1024";
    guarded(5, title, [&] {
        std::mt19937_64 rng(0xacce55);
        std::vector<oracle::Pages> streams;
        for (int i = 0; i < kOracleStreams; ++i)
            streams.push_back(oracle::random_stream(rng, 1 + rng() % kMaxTraceAccesses, 1 + rng() % 2000));
        // structured streams too, truncated to the size limit
        for (auto const & spec : {make(WorkloadKind::MatMul, {20}, 2), make(WorkloadKind::SparseMul, {40}, 2, 1, 3),
                                  make(WorkloadKind::DotProd, {5000}, 4)}) {
            auto s = oracle::to_values(gen_stream(spec).per_thread[0]);
            s.resize(std::min(s.size(), kMaxTraceAccesses));
            streams.push_back(s);
        }
        std::uint64_t compared = 0, mismatches = 0;
        for (auto const & stream : streams) {
            auto ids = oracle::to_ids(stream);
            for (std::uint32_t size : {1u, 2u, 7u, 1024u}) {
                auto t = trace_stream(ids, size);
                std::vector<oracle::Pages> got;
                for (auto const & m : t.per_thread[0])
                    got.push_back(oracle::to_values(m));
                auto want = oracle::trace(stream, size);
                ++compared;
                if (got != want || t.fault_count != oracle::flatten(want).size())
                    ++mismatches;
            }
        }
        report(5, mismatches == 0, title,
               fmt("comparisons=%llu mismatches=%llu", (unsigned long long)compared,
                   (unsigned long long)mismatches));
    });
}

void criterion_tracing_work()
{
    auto title = "matmul trace length non-increasing over microset sizes 2, 8, 64, 1024; scan constant";
    guarded(6, title, [&] {
        auto mm = gen_stream(make(WorkloadKind::MatMul, {60}, 8));
        auto scan = gen_stream(make(WorkloadKind::SeqScan, {5000}, 4));
        std::string detail = "matmul:";
        std::string scan_detail = " scan:";
        bool pass = true;
        std::uint64_t previous = ~std::uint64_t{0};
        std::set<std::uint64_t> scan_lengths;
        for (std::uint32_t size : {2u, 8u, 64u, 1024u}) {
            auto len = trace_stream(mm.per_thread[0], size).length();
            pass = pass && len <= previous;
            previous = len;
            detail += fmt(" %u->%llu", size, (unsigned long long)len);
            auto slen = trace_stream(scan.per_thread[0], size).length();
            scan_lengths.insert(slen);
            scan_detail += fmt(" %u->%llu", size, (unsigned long long)slen);
        }
        pass = pass && scan_lengths.size() == 1;
        report(6, pass, title, detail + scan_detail);
    });
}

void criterion_multithread()
{
    auto title = "2-8 partitioned threads: complete per-thread traces and zero majors with per-thread tapes";
    guarded(7, title, [&] {
        bool pass = true;
        std::string detail;
        for (std::uint32_t p = 2; p <= 8; ++p) {
            auto spec = make(WorkloadKind::MatVecMul, {200}, 1, p);
            auto s = gen_stream(spec);
            auto c = guarantee_config(local_pages_for_ratio(0.2, footprint_pages(s)));
            auto trace = trace_multithread(s, 1024, c.interleaving_quantum);
            std::uint64_t missing = 0;
            for (std::size_t t = 0; t < s.thread_count(); ++t) {
                auto flat = trace.flattened(t);
                std::set<PageId> traced(flat.begin(), flat.end());
                for (auto page : s.per_thread[t])
                    missing += traced.contains(page) ? 0 : 1;
            }
            auto tape = make_tapes_multithread(trace, c.local_pages, p);
            auto r = ledger.run(s, ThreePoPolicy{tape}, c);
            std::uint64_t thread_majors = 0;
            for (auto const & t : r.per_thread)
                thread_majors += t.majors;
            pass = pass && missing == 0 && r.majors == 0 && thread_majors == 0;
            detail += fmt("%sp=%u missing=%llu majors=%llu", p == 2 ? "" : " ", p, (unsigned long long)missing,
                          (unsigned long long)r.majors);
        }
        report(7, pass, title, detail);
    });
}

void criterion_postprocess_memory()
{
    auto title = "majors with tape(C/2) <= majors with tape(C) at runtime capacity C on 3 workloads";
    guarded(9, title, [&] {
        bool pass = true;
        std::string detail;
        std::vector<std::pair<char const *, WorkloadSpec>> specs{
            {"sparse", make(WorkloadKind::SparseMul, {300}, 8, 1, 1)},
            {"random", make(WorkloadKind::RandomOblivious, {20000, 2}, 1, 1, 7)},
            {"matmul", make(WorkloadKind::MatMul, {105}, 8)},
        };
        for (auto const & [name, spec] : specs) {
            auto s = gen_stream(spec);
            SimConfig c;
            c.local_pages = local_pages_for_ratio(0.2, footprint_pages(s));
            auto full = ledger.run(s, ThreePoPolicy{tape_for(s, c.local_pages, 1024, c.interleaving_quantum)}, c);
            auto half =
                ledger.run(s, ThreePoPolicy{tape_for(s, c.local_pages / 2, 1024, c.interleaving_quantum)}, c);
            pass = pass && half.majors <= full.majors;
            detail += fmt("%s%s: C/2=%llu C=%llu", detail.empty() ? "" : " ", name,
                          (unsigned long long)half.majors, (unsigned long long)full.majors);
        }
        report(9, pass, title, detail);
    });
}

void criterion_accounting()
{
    // runs last: it audits every simulation the other criteria performed
    report(8, ledger.runs > 0 && ledger.conservation_failures == 0 && ledger.determinism_failures == 0,
           "every run conserves access classes and repeats byte-identically",
           fmt("runs=%llu conservation_failures=%llu determinism_failures=%llu", (unsigned long long)ledger.runs,
               (unsigned long long)ledger.conservation_failures, (unsigned long long)ledger.determinism_failures));
}

} // namespace

int main()
{
    criterion_zero_majors();
    criterion_fault_ratio();
    criterion_latency_trend();
    criterion_inclusion();
    criterion_tracer_oracle();
    criterion_tracing_work();
    criterion_multithread();
    criterion_postprocess_memory();
    criterion_accounting();
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
