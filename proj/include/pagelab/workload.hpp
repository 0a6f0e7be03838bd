#ifndef PAGELAB_WORKLOAD_HPP
#define PAGELAB_WORKLOAD_HPP

#include "pagelab/page.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagelab
{

enum class WorkloadKind
{
    DotProd,
    MatVecMul,
    MatMul,
    SparseMul,
    StridedScan,
    SeqScan,
    RandomOblivious,
};

std::string_view to_string(WorkloadKind kind);
WorkloadKind parse_workload_kind(std::string_view name);

/*
 * Description of an oblivious kernel. The access stream is a pure function
 * of these fields; no data values are ever consulted.
 *
 * dims, by kind (all counts in elements):
 *   DotProd          {n}
 *   MatVecMul        {n} or {rows, cols}
 *   MatMul           {n} or {m, k, n}      A is m x k, B is k x n
 *   SparseMul        {n}                   two n x n CSR operands, 10% dense
 *   StridedScan      {count, stride}
 *   SeqScan          {n}
 *   RandomOblivious  {n} or {n, passes}    one seeded permutation per pass
 *
 * region_bases, when non-empty, gives the first page of every operand in
 * the order reported by operand_names(); otherwise operands are packed
 * back to back from page 0.
 */
struct WorkloadSpec
{
    WorkloadKind kind = WorkloadKind::SeqScan;
    std::vector<std::uint64_t> dims;
    std::uint64_t elements_per_page = 1;
    std::uint32_t threads = 1;
    std::uint64_t seed = 0;
    std::vector<PageId> region_bases;
    std::optional<std::uint64_t> address_space_pages;

    friend bool operator==(WorkloadSpec const &, WorkloadSpec const &) = default;
};

struct Region
{
    std::string name;
    PageId base;
    std::uint64_t pages = 0;
    std::uint64_t elements = 0;

    bool contains(PageId page) const
    {
        return page.value >= base.value && page.value - base.value < pages;
    }
};

/// Per-thread ordered page accesses, one event per element access.
struct AccessStream
{
    std::vector<std::vector<PageId>> per_thread;
    std::uint64_t address_space_pages = 0;

    std::size_t thread_count() const { return per_thread.size(); }
    std::uint64_t total_accesses() const;

    friend bool operator==(AccessStream const &, AccessStream const &) = default;
};

std::vector<std::string_view> operand_names(WorkloadKind kind);

/// Validates the spec and lays out its operand regions.
std::vector<Region> layout_regions(WorkloadSpec const & spec);

/// Size of the outermost loop that partition_static splits.
std::uint64_t outer_iterations(WorkloadSpec const & spec);

bool is_partitionable(WorkloadKind kind);

AccessStream gen_stream(WorkloadSpec const & spec);
AccessStream partition_static(WorkloadSpec const & spec, std::uint32_t threads);

/// Number of distinct pages touched; the 100% local-memory denominator.
std::uint64_t footprint_pages(AccessStream const & stream);

void to_json(nlohmann::json & j, WorkloadSpec const & spec);
void from_json(nlohmann::json const & j, WorkloadSpec & spec);

WorkloadSpec load_workload_spec(std::string const & path);

} // namespace pagelab

#endif // PAGELAB_WORKLOAD_HPP
