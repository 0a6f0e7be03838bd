#include "pagelab/runtime.hpp"

namespace pagelab
{

void to_json(nlohmann::json & j, SimConfig const & c)
{
    j = nlohmann::json{
        {"local_pages", c.local_pages},
        {"fetch_latency_us", c.fetch_latency_us},
        {"link_gbps", c.link_gbps},
        {"cpu_access_cost_us", c.cpu_access_cost_us},
        {"minor_fault_cost_us", c.minor_fault_cost_us},
        {"major_fault_overhead_us", c.major_fault_overhead_us},
        {"batch_size", c.batch_size},
        {"lookahead", c.lookahead},
        {"readahead_window", c.readahead_window},
        {"stride_history", c.stride_history},
        {"interleaving_quantum", c.interleaving_quantum},
        {"reclaimer_pages_per_us", c.reclaimer_pages_per_us},
        {"reclaim_pool_pages", c.reclaim_pool_pages},
        {"audit", c.audit},
    };
}

// Missing keys keep their defaults, so a config file may override a subset.
void from_json(nlohmann::json const & j, SimConfig & c)
{
    auto read = [&j](char const * key, auto & field) {
        if (j.contains(key))
            j.at(key).get_to(field);
    };
    read("local_pages", c.local_pages);
    read("fetch_latency_us", c.fetch_latency_us);
    read("link_gbps", c.link_gbps);
    read("cpu_access_cost_us", c.cpu_access_cost_us);
    read("minor_fault_cost_us", c.minor_fault_cost_us);
    read("major_fault_overhead_us", c.major_fault_overhead_us);
    read("batch_size", c.batch_size);
    read("lookahead", c.lookahead);
    read("readahead_window", c.readahead_window);
    read("stride_history", c.stride_history);
    read("interleaving_quantum", c.interleaving_quantum);
    read("reclaimer_pages_per_us", c.reclaimer_pages_per_us);
    read("reclaim_pool_pages", c.reclaim_pool_pages);
    read("audit", c.audit);
}

void to_json(nlohmann::json & j, ThreadReport const & r)
{
    j = nlohmann::json{
        {"accesses", r.accesses},
        {"hits", r.hits},
        {"minors", r.minors},
        {"delayed_hits", r.delayed_hits},
        {"majors", r.majors},
        {"cpu_us", r.cpu_us},
        {"handler_us", r.handler_us},
        {"stall_io_us", r.stall_io_us},
        {"evict_stall_us", r.evict_stall_us},
    };
}

void from_json(nlohmann::json const & j, ThreadReport & r)
{
    j.at("accesses").get_to(r.accesses);
    j.at("hits").get_to(r.hits);
    j.at("minors").get_to(r.minors);
    j.at("delayed_hits").get_to(r.delayed_hits);
    j.at("majors").get_to(r.majors);
    j.at("cpu_us").get_to(r.cpu_us);
    j.at("handler_us").get_to(r.handler_us);
    j.at("stall_io_us").get_to(r.stall_io_us);
    j.at("evict_stall_us").get_to(r.evict_stall_us);
}

void to_json(nlohmann::json & j, SimReport const & r)
{
    j = nlohmann::json{
        {"policy", r.policy},
        {"local_pages", r.local_pages},
        {"accesses", r.accesses},
        {"majors", r.majors},
        {"minors", r.minors},
        {"delayed_hits", r.delayed_hits},
        {"hits", r.hits},
        {"stall_io_us", r.stall_io_us},
        {"evict_stall_us", r.evict_stall_us},
        {"handler_us", r.handler_us},
        {"cpu_us", r.cpu_us},
        {"total_us", r.total_us},
        {"startup_us", r.startup_us},
        {"demand_fetches", r.demand_fetches},
        {"prefetches", r.prefetches},
        {"evictions", r.evictions},
        {"key_faults", r.key_faults},
        {"premapped", r.premapped},
        {"peak_link_utilization", r.peak_link_utilization},
        {"tape_capacity_mismatch", r.tape_capacity_mismatch},
        {"per_thread", r.per_thread},
    };
    j["tape_target_pages"] = r.tape_target_pages ? nlohmann::json(*r.tape_target_pages) : nlohmann::json();
}

void from_json(nlohmann::json const & j, SimReport & r)
{
    r = SimReport{};
    j.at("policy").get_to(r.policy);
    r.local_pages = j.value("local_pages", std::uint64_t{0});
    j.at("majors").get_to(r.majors);
    j.at("minors").get_to(r.minors);
    j.at("delayed_hits").get_to(r.delayed_hits);
    j.at("hits").get_to(r.hits);
    r.accesses = j.value("accesses", r.majors + r.minors + r.delayed_hits + r.hits);
    j.at("stall_io_us").get_to(r.stall_io_us);
    j.at("evict_stall_us").get_to(r.evict_stall_us);
    j.at("handler_us").get_to(r.handler_us);
    j.at("cpu_us").get_to(r.cpu_us);
    j.at("total_us").get_to(r.total_us);
    r.startup_us = j.value("startup_us", 0.0);
    r.demand_fetches = j.value("demand_fetches", std::uint64_t{0});
    r.prefetches = j.value("prefetches", std::uint64_t{0});
    r.evictions = j.value("evictions", std::uint64_t{0});
    r.key_faults = j.value("key_faults", std::uint64_t{0});
    r.premapped = j.value("premapped", std::uint64_t{0});
    r.peak_link_utilization = j.value("peak_link_utilization", 0.0);
    r.tape_capacity_mismatch = j.value("tape_capacity_mismatch", false);
    if (j.contains("tape_target_pages") && !j.at("tape_target_pages").is_null())
        r.tape_target_pages = j.at("tape_target_pages").get<std::uint64_t>();
    if (j.contains("per_thread"))
        j.at("per_thread").get_to(r.per_thread);
}

} // namespace pagelab
