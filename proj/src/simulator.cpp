#include "pagelab/runtime.hpp"

#include <algorithm>
#include <cmath>

namespace pagelab
{

void SimConfig::validate() const
{
    if (local_pages == 0)
        throw InvalidParameter("local_pages must be at least 1");
    if (batch_size == 0)
        throw InvalidParameter("batch_size must be at least 1");
    if (interleaving_quantum == 0)
        throw InvalidParameter("interleaving_quantum must be at least 1");
    for (double v : {fetch_latency_us, link_gbps, cpu_access_cost_us, minor_fault_cost_us,
                     major_fault_overhead_us, reclaimer_pages_per_us}) {
        if (!(v >= 0) || !std::isfinite(v))
            throw InvalidParameter("rates and costs must be finite and non-negative");
    }
}

SimTime SimConfig::page_service_time() const
{
    if (link_gbps <= 0)
        return 0;
    // bits per page / (Gbit/s) = ns; scaled to ps
    return static_cast<SimTime>(std::llround(static_cast<double>(kPageBytes * 8) * 1000.0 / link_gbps));
}

namespace
{

constexpr SimTime kUtilizationWindow = 100'000'000; // 100 us

struct ThreadClock
{
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t minors = 0;
    std::uint64_t delayed_hits = 0;
    std::uint64_t majors = 0;
    SimTime cpu = 0;
    SimTime handler = 0;
    SimTime stall_io = 0;
    SimTime evict_stall = 0;
};

SimConfig const & validated(SimConfig const & config)
{
    config.validate();
    return config;
}

class Simulator
{
public:
    Simulator(AccessStream const & streams, PrefetchPolicy const & policy, SimConfig const & config)
        : streams_(streams)
        , policy_(policy)
        , config_(validated(config))
        , memory_(config.local_pages,
                  config.reclaimer_pages_per_us > 0 ? us_to_ps(1.0 / config.reclaimer_pages_per_us) : 0,
                  config.reclaim_pool_pages)
        , service_(config.page_service_time())
        , latency_(us_to_ps(config.fetch_latency_us))
        , cpu_cost_(us_to_ps(config.cpu_access_cost_us))
        , minor_cost_(us_to_ps(config.minor_fault_cost_us))
        , major_cost_(us_to_ps(config.major_fault_overhead_us))
        , clocks_(streams.thread_count())
        , histories_(streams.thread_count())
    {
        tape_ = std::get_if<ThreePoPolicy>(&policy_);
        if (tape_) {
            if (tape_->tape.thread_count() != streams.thread_count())
                throw InvalidParameter("tape has " + std::to_string(tape_->tape.thread_count()) +
                                       " threads but the stream has " +
                                       std::to_string(streams.thread_count()));
            keys_.resize(streams.thread_count());
        }
    }

    SimReport run()
    {
        if (tape_)
            bootstrap();

        auto const n = streams_.thread_count();
        std::vector<std::size_t> cursor(n, 0);
        bool pending = true;
        while (pending) {
            pending = false;
            for (std::size_t t = 0; t < n; ++t) {
                auto const & s = streams_.per_thread[t];
                auto stop = std::min<std::size_t>(s.size(), cursor[t] + config_.interleaving_quantum);
                for (; cursor[t] < stop; ++cursor[t])
                    access(t, s[cursor[t]]);
                pending = pending || cursor[t] < s.size();
            }
        }
        return report();
    }

private:
    void bootstrap()
    {
        for (std::size_t t = 0; t < keys_.size(); ++t) {
            auto const & tape = tape_->tape.per_thread[t];
            auto state = threepo_bootstrap(tape, config_);
            std::size_t requested = 0;
            while (requested < state.prefetch_end && prefetch(tape[requested]))
                ++requested;
            state.prefetch_end = requested;
            keys_[t] = state;
        }
        // The application starts once the initial window has landed.
        auto last = now_;
        while (auto t = memory_.earliest_arrival()) {
            last = *t;
            memory_.retire(*t);
        }
        startup_ = last - now_;
        now_ = last;
    }

    void access(std::size_t t, PageId page)
    {
        memory_.retire(now_);
        auto & clock = clocks_[t];
        ++clock.accesses;

        if (memory_.mapped(page)) {
            ++clock.hits;
            memory_.touch(page);
        } else if (memory_.present(page)) {
            ++clock.minors;
            advance(clock.handler, minor_cost_);
            resolve(t, page);
            on_fault(t, page);
        } else if (auto arrival = memory_.arrival(page)) {
            ++clock.delayed_hits;
            advance(clock.stall_io, *arrival - now_);
            memory_.retire(now_);
            advance(clock.handler, minor_cost_);
            resolve(t, page);
            on_fault(t, page);
        } else {
            ++clock.majors;
            major_fault(t, page);
        }

        advance(clock.cpu, cpu_cost_);
        if (config_.audit)
            memory_.audit();
    }

    void major_fault(std::size_t t, PageId page)
    {
        auto & clock = clocks_[t];
        auto ready = reserve_frame(t, false);
        advance(clock.evict_stall, *ready - now_);
        start_fetch(page, now_);
        ++demand_fetches_;

        if (auto const * ra = std::get_if<ReadaheadPolicy>(&policy_)) {
            auto pages = readahead_on_major(page, memory_, ra->window, streams_.address_space_pages);
            prefetch_all(std::span(pages).subspan(1));
        } else if (auto const * stride = std::get_if<StridePolicy>(&policy_)) {
            auto pages = stride_on_major(page, histories_[t], memory_, *stride,
                                         streams_.address_space_pages);
            prefetch_all(std::span(pages).subspan(1));
        } else if (tape_ && keys_[t].key == page) {
            // prefetch decisions are made before blocking on the key page
            ++key_faults_;
            key_step(t);
        }

        advance(clock.stall_io, *memory_.arrival(page) - now_);
        memory_.retire(now_);
        advance(clock.handler, major_cost_);
        resolve(t, page);
        drain_pending();
    }

    // Maps and touches the page a fault was taken on.
    void resolve(std::size_t t, PageId page)
    {
        map_page(t, page);
        memory_.touch(page);
    }

    void on_fault(std::size_t t, PageId page)
    {
        // first touches of prefetched pages are faults too; they keep the stride visible
        if (auto const * stride = std::get_if<StridePolicy>(&policy_))
            record_fault(histories_[t], page, stride->history_len);
        if (tape_ && keys_[t].key == page) {
            ++key_faults_;
            key_step(t);
        }
        drain_pending();
    }

    void key_step(std::size_t t)
    {
        auto const & tape = tape_->tape.per_thread[t];
        auto const previous = keys_[t];
        auto plan = threepo_on_key_fault(previous, tape, memory_, config_);

        auto stopped = plan.fetch_end;
        for (auto i = plan.fetch_begin; i < plan.fetch_end; ++i) {
            if (!prefetch(tape[i])) {
                stopped = i;
                break;
            }
        }
        plan.next.prefetch_end = std::max(previous.prefetch_end, stopped);
        keys_[t] = plan.next;

        for (auto i = plan.map_begin; i < plan.map_end; ++i) {
            if (memory_.present(tape[i]) && !memory_.mapped(tape[i])) {
                ++premapped_;
                map_page(t, tape[i]);
            }
        }
    }

    void map_page(std::size_t t, PageId page)
    {
        memory_.map(page);
        if (tape_ && keys_.size() > 1) {
            for (auto other : threepo_on_map(page, t, keys_))
                pending_.push_back(other);
        }
    }

    // Threads whose key page another thread mapped resynchronize here.
    void drain_pending()
    {
        while (!pending_.empty()) {
            auto t = pending_.front();
            pending_.pop_front();
            if (keys_[t].key && memory_.mapped(*keys_[t].key))
                key_step(t);
        }
    }

    bool prefetch(PageId page)
    {
        if (memory_.present(page) || memory_.in_flight(page))
            return true;
        auto ready = reserve_frame(0, true);
        if (!ready)
            return false;
        start_fetch(page, *ready);
        ++prefetches_;
        return true;
    }

    void prefetch_all(std::span<PageId const> pages)
    {
        for (auto page : pages) {
            if (!prefetch(page))
                break;
        }
    }

    /*
     * Finds a frame for a fetch. Prefetches never displace a page that has
     * not been referenced since it arrived, and never wait on in-flight
     * fetches; they are dropped instead. Demand fetches always get a frame.
     */
    std::optional<SimTime> reserve_frame(std::size_t t, bool for_prefetch)
    {
        if (memory_.has_free_frame())
            return now_;
        auto victim = memory_.lru_victim();
        if (for_prefetch) {
            if (!victim || !memory_.referenced(*victim))
                return std::nullopt;
            return memory_.evict_lru(now_);
        }
        while (!victim) {
            // every frame holds a fetch in flight
            advance(clocks_[t].evict_stall, *memory_.earliest_arrival() - now_);
            memory_.retire(now_);
            victim = memory_.lru_victim();
        }
        return memory_.evict_lru(now_);
    }

    void start_fetch(PageId page, SimTime ready)
    {
        auto start = std::max(ready, link_free_);
        auto end = start + service_;
        link_free_ = end;
        account_link(start, end);
        memory_.begin_fetch(page, end + latency_);
    }

    void account_link(SimTime start, SimTime end)
    {
        while (start < end) {
            auto bucket = static_cast<std::size_t>(start / kUtilizationWindow);
            auto bucket_end = static_cast<SimTime>(bucket + 1) * kUtilizationWindow;
            auto chunk = std::min(end, bucket_end) - start;
            if (link_busy_.size() <= bucket)
                link_busy_.resize(bucket + 1, 0);
            link_busy_[bucket] += chunk;
            start += chunk;
        }
    }

    void advance(SimTime & bucket, SimTime dt)
    {
        if (dt <= 0)
            return;
        bucket += dt;
        now_ += dt;
    }

    SimReport report() const
    {
        SimReport r;
        r.policy = std::string(policy_name(policy_));
        r.local_pages = config_.local_pages;
        SimTime cpu = 0, handler = 0, stall = startup_, evict = 0;
        for (auto const & c : clocks_) {
            ThreadReport tr;
            tr.accesses = c.accesses;
            tr.hits = c.hits;
            tr.minors = c.minors;
            tr.delayed_hits = c.delayed_hits;
            tr.majors = c.majors;
            tr.cpu_us = ps_to_us(c.cpu);
            tr.handler_us = ps_to_us(c.handler);
            tr.stall_io_us = ps_to_us(c.stall_io);
            tr.evict_stall_us = ps_to_us(c.evict_stall);
            r.per_thread.push_back(tr);

            r.accesses += c.accesses;
            r.hits += c.hits;
            r.minors += c.minors;
            r.delayed_hits += c.delayed_hits;
            r.majors += c.majors;
            cpu += c.cpu;
            handler += c.handler;
            stall += c.stall_io;
            evict += c.evict_stall;
        }
        r.cpu_us = ps_to_us(cpu);
        r.handler_us = ps_to_us(handler);
        r.stall_io_us = ps_to_us(stall);
        r.evict_stall_us = ps_to_us(evict);
        r.total_us = ps_to_us(now_);
        r.startup_us = ps_to_us(startup_);
        r.demand_fetches = demand_fetches_;
        r.prefetches = prefetches_;
        r.evictions = memory_.evictions();
        r.key_faults = key_faults_;
        r.premapped = premapped_;
        SimTime peak = 0;
        for (auto busy : link_busy_)
            peak = std::max(peak, busy);
        r.peak_link_utilization = static_cast<double>(peak) / static_cast<double>(kUtilizationWindow);
        if (tape_) {
            r.tape_target_pages = tape_->tape.target_pages;
            r.tape_capacity_mismatch = tape_->tape.target_pages < config_.local_pages;
        }
        return r;
    }

    AccessStream const & streams_;
    PrefetchPolicy const & policy_;
    SimConfig config_;
    MemoryState memory_;
    SimTime service_;
    SimTime latency_;
    SimTime cpu_cost_;
    SimTime minor_cost_;
    SimTime major_cost_;

    ThreePoPolicy const * tape_ = nullptr;
    std::vector<KeyPageState> keys_;
    std::deque<std::size_t> pending_;

    std::vector<ThreadClock> clocks_;
    std::vector<std::deque<PageId>> histories_;

    SimTime now_ = 0;
    SimTime startup_ = 0;
    SimTime link_free_ = 0;
    std::vector<SimTime> link_busy_;
    std::uint64_t demand_fetches_ = 0;
    std::uint64_t prefetches_ = 0;
    std::uint64_t key_faults_ = 0;
    std::uint64_t premapped_ = 0;
};

} // namespace

SimReport run_sim(AccessStream const & streams, PrefetchPolicy const & policy, SimConfig const & config)
{
    return Simulator(streams, policy, config).run();
}

} // namespace pagelab
