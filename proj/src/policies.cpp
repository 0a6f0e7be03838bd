#include "pagelab/runtime.hpp"

#include <algorithm>
#include <map>

namespace pagelab
{

std::string_view policy_name(PrefetchPolicy const & policy)
{
    struct Namer
    {
        std::string_view operator()(NoPrefetch const &) const { return "none"; }
        std::string_view operator()(ReadaheadPolicy const &) const { return "readahead"; }
        std::string_view operator()(StridePolicy const &) const { return "stride"; }
        std::string_view operator()(ThreePoPolicy const &) const { return "threepo"; }
    };
    return std::visit(Namer{}, policy);
}

KeyPageState threepo_bootstrap(std::span<PageId const> tape, SimConfig const & config)
{
    KeyPageState state;
    if (tape.empty())
        return state;
    state.key = tape.front();
    state.key_index = 0;
    state.prefetch_end = std::min<std::size_t>(
        tape.size(), std::size_t{config.batch_size} + config.lookahead);
    return state;
}

KeyFaultPlan threepo_on_key_fault(KeyPageState const & state, std::span<PageId const> tape,
                                  MemoryState const & memory, SimConfig const & config)
{
    auto const n = tape.size();
    auto const key_index = state.key_index;

    std::size_t next_key = n;
    for (auto i = key_index + config.batch_size; i < n; ++i) {
        if (!memory.mapped(tape[i])) {
            next_key = i;
            break;
        }
    }

    KeyFaultPlan plan;
    plan.fetch_begin = std::max(state.prefetch_end, key_index);
    plan.map_begin = key_index;
    if (next_key < n) {
        auto window_end = key_index + std::size_t{config.batch_size} + config.lookahead + 1;
        // the next key is requested even if it lies past the lookahead window
        plan.fetch_end = std::max(std::min(window_end, n), next_key + 1);
        plan.map_end = next_key;
        plan.next.key = tape[next_key];
        plan.next.key_index = next_key;
    } else {
        plan.fetch_end = n;
        plan.map_end = n;
        plan.next.key = std::nullopt;
        plan.next.key_index = n;
    }
    plan.fetch_begin = std::min(plan.fetch_begin, plan.fetch_end);
    plan.next.prefetch_end = std::max(state.prefetch_end, plan.fetch_end);
    return plan;
}

std::vector<std::size_t> threepo_on_map(PageId mapped_page, std::size_t mapper,
                                        std::span<KeyPageState const> key_states)
{
    std::vector<std::size_t> affected;
    for (std::size_t t = 0; t < key_states.size(); ++t) {
        if (t != mapper && key_states[t].key == mapped_page)
            affected.push_back(t);
    }
    return affected;
}

namespace
{

bool fetchable(PageId page, MemoryState const & memory)
{
    return !memory.present(page) && !memory.in_flight(page);
}

bool in_address_space(std::int64_t page, std::uint64_t address_space_pages)
{
    if (page < 0)
        return false;
    return address_space_pages == 0 || static_cast<std::uint64_t>(page) < address_space_pages;
}

} // namespace

std::vector<PageId> readahead_on_major(PageId faulted, MemoryState const & memory,
                                       std::uint32_t window, std::uint64_t address_space_pages)
{
    std::vector<PageId> out{faulted};
    if (window <= 1)
        return out;
    if (auto slot = memory.swap_slot(faulted)) {
        for (std::uint64_t s = *slot + 1; s < *slot + window; ++s) {
            auto page = memory.page_in_slot(s);
            if (page && fetchable(*page, memory))
                out.push_back(*page);
        }
        return out;
    }
    for (std::uint64_t k = 1; k < window; ++k) {
        auto candidate = static_cast<std::int64_t>(faulted.value + k);
        if (!in_address_space(candidate, address_space_pages))
            break;
        PageId page{static_cast<std::uint64_t>(candidate)};
        if (fetchable(page, memory))
            out.push_back(page);
    }
    return out;
}

std::optional<std::int64_t> majority_delta(std::span<PageId const> history)
{
    if (history.size() < 2)
        return std::nullopt;
    std::map<std::int64_t, std::size_t> votes;
    for (std::size_t i = 1; i < history.size(); ++i) {
        auto delta = static_cast<std::int64_t>(history[i].value - history[i - 1].value);
        ++votes[delta];
    }
    auto deltas = history.size() - 1;
    for (auto const & [delta, count] : votes) {
        if (delta != 0 && 2 * count > deltas)
            return delta;
    }
    return std::nullopt;
}

void record_fault(std::deque<PageId> & history, PageId page, std::uint32_t history_len)
{
    history.push_back(page);
    while (history.size() > std::max<std::uint32_t>(history_len, 1))
        history.pop_front();
}

std::vector<PageId> stride_on_major(PageId faulted, std::deque<PageId> & history,
                                    MemoryState const & memory, StridePolicy const & policy,
                                    std::uint64_t address_space_pages)
{
    record_fault(history, faulted, policy.history_len);

    std::vector<PageId> window(history.begin(), history.end());
    auto delta = majority_delta(window);
    if (!delta)
        return readahead_on_major(faulted, memory, policy.window, address_space_pages);

    std::vector<PageId> out{faulted};
    for (std::uint32_t k = 1; k <= policy.window; ++k) {
        auto candidate = static_cast<std::int64_t>(faulted.value) + *delta * static_cast<std::int64_t>(k);
        if (!in_address_space(candidate, address_space_pages))
            break;
        PageId page{static_cast<std::uint64_t>(candidate)};
        if (fetchable(page, memory))
            out.push_back(page);
    }
    return out;
}

} // namespace pagelab
