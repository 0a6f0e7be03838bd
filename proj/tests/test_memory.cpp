#include "pagelab/runtime.hpp"

#include <doctest.h>

using namespace pagelab;

namespace
{

PageId P(std::uint64_t v)
{
    return PageId{v};
}

} // namespace

TEST_CASE("time conversion is exact on the picosecond grid")
{
    CHECK(us_to_ps(5.0) == 5'000'000);
    CHECK(us_to_ps(0.2) == 200'000);
    CHECK(ps_to_us(us_to_ps(15.2)) == doctest::Approx(15.2).epsilon(1e-12));
}

TEST_CASE("page service time follows link bandwidth")
{
    SimConfig c;
    c.link_gbps = 25;
    CHECK(c.page_service_time() == 1'310'720); // 32768 bits at 25 Gbit/s
    c.link_gbps = 0;
    CHECK(c.page_service_time() == 0);
}

TEST_CASE("config validation")
{
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.local_pages = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = SimConfig{};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = SimConfig{};
    c.fetch_latency_us = -1;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = SimConfig{};
    c.interleaving_quantum = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("fetches occupy frames until they land")
{
    MemoryState m(2, 0, 32);
    m.begin_fetch(P(1), 10);
    m.begin_fetch(P(2), 5);
    CHECK_FALSE(m.has_free_frame());
    CHECK(m.in_flight(P(1)));
    CHECK(m.earliest_arrival() == 5);
    CHECK(m.retire(4) == 0);
    CHECK(m.retire(5) == 1);
    CHECK(m.present(P(2)));
    CHECK_FALSE(m.mapped(P(2)));
    CHECK_FALSE(m.referenced(P(2)));
    CHECK(m.arrival(P(1)) == 10);
    CHECK(m.retire(100) == 1);
    CHECK(m.in_flight_count() == 0);
    CHECK_THROWS_AS(m.begin_fetch(P(3), 1), InvalidParameter);
    CHECK_NOTHROW(m.audit());
}

TEST_CASE("eviction takes the least recently used page and assigns slots in order")
{
    MemoryState m(3, 0, 32);
    m.install(P(10), true);
    m.install(P(11), true);
    m.install(P(12), true);
    m.touch(P(10));
    CHECK(m.lru_victim() == P(11));
    CHECK(m.evict_lru(0) == 0);
    CHECK_FALSE(m.present(P(11)));
    CHECK(m.swap_slot(P(11)) == 0u);
    CHECK(m.evict_lru(0) == 0);
    CHECK(m.swap_slot(P(12)) == 1u);
    CHECK(m.page_in_slot(1) == P(12));
    CHECK(m.mapped_count() == 1);
    CHECK(m.evictions() == 2);

    // a page evicted again moves to a fresh slot
    m.install(P(11), false);
    m.touch(P(10));
    CHECK(m.evict_lru(0) == 0);
    CHECK(m.swap_slot(P(11)) == 2u);
    CHECK_FALSE(m.page_in_slot(0).has_value());
}

TEST_CASE("mapping and touching require residency")
{
    MemoryState m(1, 0, 32);
    CHECK_THROWS_AS(m.map(P(1)), InvalidParameter);
    CHECK_THROWS_AS(m.touch(P(1)), InvalidParameter);
    m.install(P(1), false);
    m.map(P(1));
    m.map(P(1));
    CHECK(m.mapped_count() == 1);
    CHECK_THROWS_AS(m.install(P(1), false), InvalidParameter);
}

TEST_CASE("a slow reclaimer stalls eviction once its buffer is full")
{
    // 1 us per write-back, buffer of 2 pages
    MemoryState m(4, 1'000'000, 2);
    for (std::uint64_t p = 0; p < 4; ++p)
        m.install(P(p), true);
    CHECK(m.evict_lru(0) == 0);
    CHECK(m.evict_lru(0) == 0);
    // third write-back queued behind two; must wait for the first to finish
    CHECK(m.evict_lru(0) == 1'000'000);
    // by t = 5 us every write-back is done
    m.install(P(9), true);
    CHECK(m.evict_lru(5'000'000) == 5'000'000);
}

TEST_CASE("an unlimited reclaimer never stalls")
{
    MemoryState m(64, 0, 1);
    for (std::uint64_t p = 0; p < 64; ++p)
        m.install(P(p), true);
    for (int i = 0; i < 64; ++i)
        CHECK(m.evict_lru(7) == 7);
}
