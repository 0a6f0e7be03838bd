#include "oracles.hpp"

#include "pagelab/tracer.hpp"
#include "pagelab/workload.hpp"

#include <doctest.h>

#include <set>

using namespace pagelab;

namespace
{

constexpr std::uint64_t A = 1, B = 2, C = 3, D = 4;

std::vector<oracle::Pages> microsets(Trace const & t, std::size_t thread = 0)
{
    std::vector<oracle::Pages> out;
    for (auto const & m : t.per_thread[thread])
        out.push_back(oracle::to_values(m));
    return out;
}

Trace run(oracle::Pages const & pages, std::uint32_t size)
{
    auto ids = oracle::to_ids(pages);
    return trace_stream(ids, size);
}

} // namespace

TEST_CASE("ABABAB collapses into one microset")
{
    auto t = run({A, B, A, B, A, B}, 2);
    CHECK(microsets(t) == std::vector<oracle::Pages>{{A, B}});
    CHECK(t.fault_count == 2);
}

TEST_CASE("distinct pages fill consecutive microsets")
{
    auto t = run({A, B, C, D}, 2);
    CHECK(microsets(t) == std::vector<oracle::Pages>{{A, B}, {C, D}});
    CHECK(t.fault_count == 4);
}

TEST_CASE("a flush clears presence so a returning page faults again")
{
    auto t = run({A, B, C, A}, 2);
    CHECK(microsets(t) == std::vector<oracle::Pages>{{A, B}, {C, A}});
    CHECK(t.fault_count == 4);
}

TEST_CASE("empty stream gives an empty trace; zero microset size is rejected")
{
    auto t = run({}, 4);
    CHECK(t.length() == 0);
    CHECK(t.fault_count == 0);
    CHECK_THROWS_AS(run({A}, 0), InvalidParameter);
    CHECK_THROWS_AS(MicrosetTracer(0), InvalidParameter);
}

TEST_CASE("microset size one records the stream without consecutive repeats")
{
    std::mt19937_64 rng(17);
    for (int round = 0; round < 50; ++round) {
        auto stream = oracle::random_stream(rng, 300, 20);
        oracle::Pages collapsed;
        for (auto p : stream) {
            if (collapsed.empty() || collapsed.back() != p)
                collapsed.push_back(p);
        }
        CHECK(oracle::to_values(run(stream, 1).flattened(0)) == collapsed);
    }
}

TEST_CASE("tracer matches the brute-force interpreter")
{
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 200; ++round) {
        auto stream = oracle::random_stream(rng, 1 + rng() % 800, 1 + rng() % 60);
        for (std::uint32_t size : {1u, 2u, 3u, 7u, 64u, 1024u}) {
            auto t = run(stream, size);
            auto expect = oracle::trace(stream, size);
            REQUIRE(microsets(t) == expect);
            REQUIRE(t.fault_count == oracle::flatten(expect).size());
        }
    }
}

TEST_CASE("trace invariants on random streams")
{
    std::mt19937_64 rng(99);
    for (int round = 0; round < 100; ++round) {
        auto stream = oracle::random_stream(rng, 500, 40);
        auto size = static_cast<std::uint32_t>(1 + rng() % 16);
        auto t = run(stream, size);

        std::uint64_t total = 0;
        for (auto const & m : t.per_thread[0]) {
            total += m.size();
            REQUIRE(m.size() <= size);
            REQUIRE(!m.empty());
            std::set<std::uint64_t> unique;
            for (auto p : m)
                unique.insert(p.value);
            REQUIRE(unique.size() == m.size());
        }
        CHECK(total == t.fault_count);
        CHECK(total == t.length());

        auto flat = oracle::to_values(t.flattened(0));
        CHECK(std::set<std::uint64_t>(flat.begin(), flat.end()) ==
              std::set<std::uint64_t>(stream.begin(), stream.end()));
        CHECK(oracle::is_subsequence(flat, stream));
    }
}

TEST_CASE("incremental tracer reports faults and traced pages")
{
    MicrosetTracer tracer(2);
    for (auto p : {A, B, A, C, A})
        tracer.access(PageId{p});
    CHECK(tracer.faults() == 4);
    CHECK(tracer.traced_pages().size() == 3);
    auto ms = tracer.finish();
    REQUIRE(ms.size() == 2);
    CHECK(oracle::to_values(ms[1]) == oracle::Pages{C, A});
}

TEST_CASE("sequential scan trace length does not depend on microset size")
{
    WorkloadSpec s;
    s.kind = WorkloadKind::SeqScan;
    s.dims = {1000};
    auto stream = gen_stream(s);
    for (std::uint32_t size : {1u, 2u, 8u, 64u, 1024u})
        CHECK(trace_stream(stream.per_thread[0], size).length() == 1000);
}

TEST_CASE("multithread tracing keeps per-thread presence")
{
    SUBCASE("disjoint threads trace as if alone")
    {
        AccessStream s;
        s.per_thread = {oracle::to_ids({1, 2, 1, 3, 4, 1}), oracle::to_ids({10, 11, 12, 10, 13})};
        auto t = trace_multithread(s, 2, 2);
        REQUIRE(t.thread_count() == 2);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(t.per_thread[i] == trace_stream(s.per_thread[i], 2).per_thread[0]);
        CHECK(t.fault_count == trace_stream(s.per_thread[0], 2).fault_count +
                                   trace_stream(s.per_thread[1], 2).fault_count);
    }
    SUBCASE("a page read by both threads appears in both traces")
    {
        AccessStream s;
        s.per_thread = {oracle::to_ids({7, 1}), oracle::to_ids({7, 2})};
        auto t = trace_multithread(s, 4, 1);
        CHECK(microsets(t, 0) == std::vector<oracle::Pages>{{7, 1}});
        CHECK(microsets(t, 1) == std::vector<oracle::Pages>{{7, 2}});
    }
    SUBCASE("one thread is plain tracing")
    {
        AccessStream s;
        s.per_thread = {oracle::to_ids({1, 2, 3, 1, 2, 5})};
        CHECK(trace_multithread(s, 2, 3) == trace_stream(s.per_thread[0], 2));
    }
    SUBCASE("result does not depend on the quantum")
    {
        std::mt19937_64 rng(5);
        AccessStream s;
        for (int t = 0; t < 3; ++t)
            s.per_thread.push_back(oracle::to_ids(oracle::random_stream(rng, 200, 30)));
        auto base = trace_multithread(s, 4, 1);
        for (std::uint64_t q : {2u, 7u, 64u, 1000u})
            CHECK(trace_multithread(s, 4, q) == base);
    }
    SUBCASE("bad arguments")
    {
        AccessStream s;
        CHECK_THROWS_AS(trace_multithread(s, 4, 1), InvalidParameter);
        s.per_thread = {oracle::to_ids({1})};
        CHECK_THROWS_AS(trace_multithread(s, 4, 0), InvalidParameter);
        CHECK_THROWS_AS(trace_multithread(s, 0, 1), InvalidParameter);
    }
}
