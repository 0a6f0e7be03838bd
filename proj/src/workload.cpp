#include "pagelab/workload.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

namespace pagelab
{

namespace
{

constexpr std::array kKindNames{
    std::pair{WorkloadKind::DotProd, std::string_view{"DotProd"}},
    std::pair{WorkloadKind::MatVecMul, std::string_view{"MatVecMul"}},
    std::pair{WorkloadKind::MatMul, std::string_view{"MatMul"}},
    std::pair{WorkloadKind::SparseMul, std::string_view{"SparseMul"}},
    std::pair{WorkloadKind::StridedScan, std::string_view{"StridedScan"}},
    std::pair{WorkloadKind::SeqScan, std::string_view{"SeqScan"}},
    std::pair{WorkloadKind::RandomOblivious, std::string_view{"RandomOblivious"}},
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw InvalidParameter("workload dimensions overflow the page space");
    return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b)
{
    if (b > std::numeric_limits<std::uint64_t>::max() - a)
        throw InvalidParameter("workload dimensions overflow the page space");
    return a + b;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b)
{
    return a / b + (a % b != 0 ? 1 : 0);
}

// Nonzeros per CSR row: 90% of every row is zero.
std::uint64_t sparse_row_nnz(std::uint64_t n)
{
    return std::max<std::uint64_t>(1, ceil_div(n, 10));
}

struct Shape
{
    // Element count of each operand, in operand_names() order.
    std::vector<std::uint64_t> elements;
    std::uint64_t outer = 0;
};

void require_dims(WorkloadSpec const & spec, std::initializer_list<std::size_t> allowed)
{
    if (std::find(allowed.begin(), allowed.end(), spec.dims.size()) == allowed.end())
        throw InvalidParameter(
            "wrong number of dims for " + std::string(to_string(spec.kind)));
    for (auto d : spec.dims) {
        if (d == 0)
            throw InvalidParameter("zero-size dimension");
    }
}

Shape shape_of(WorkloadSpec const & spec)
{
    auto const & d = spec.dims;
    switch (spec.kind) {
    case WorkloadKind::DotProd:
        require_dims(spec, {1});
        return {{d[0], d[0]}, d[0]};
    case WorkloadKind::MatVecMul: {
        require_dims(spec, {1, 2});
        auto rows = d[0];
        auto cols = d.size() == 2 ? d[1] : d[0];
        return {{checked_mul(rows, cols), cols, rows}, rows};
    }
    case WorkloadKind::MatMul: {
        require_dims(spec, {1, 3});
        auto m = d[0];
        auto k = d.size() == 3 ? d[1] : d[0];
        auto n = d.size() == 3 ? d[2] : d[0];
        return {{checked_mul(m, k), checked_mul(k, n), checked_mul(m, n)}, m};
    }
    case WorkloadKind::SparseMul: {
        require_dims(spec, {1});
        auto n = d[0];
        auto nnz = checked_mul(n, sparse_row_nnz(n));
        auto rowptr = checked_add(n, 1);
        return {{rowptr, nnz, rowptr, nnz, checked_mul(n, n)}, n};
    }
    case WorkloadKind::StridedScan: {
        require_dims(spec, {2});
        auto span = checked_add(checked_mul(d[0] - 1, d[1]), 1);
        return {{span}, d[0]};
    }
    case WorkloadKind::SeqScan:
        require_dims(spec, {1});
        return {{d[0]}, d[0]};
    case WorkloadKind::RandomOblivious:
        require_dims(spec, {1, 2});
        return {{d[0]}, d.size() == 2 ? d[1] : 1};
    }
    throw InvalidParameter("unknown workload kind");
}

// Seeded column pattern of an n x n CSR matrix: row-major, sorted per row.
std::vector<std::uint64_t> sparse_pattern(std::uint64_t n, std::uint64_t seed)
{
    auto nnz = sparse_row_nnz(n);
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::uint64_t{0});
    std::vector<std::uint64_t> cols;
    cols.reserve(n * nnz);
    for (std::uint64_t row = 0; row < n; ++row) {
        // partial Fisher-Yates; the pool stays a permutation between rows
        for (std::uint64_t i = 0; i < nnz; ++i) {
            auto j = i + rng() % (n - i);
            std::swap(pool[i], pool[j]);
        }
        auto first = cols.size();
        cols.insert(cols.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(nnz));
        std::sort(cols.begin() + static_cast<std::ptrdiff_t>(first), cols.end());
    }
    return cols;
}

class StreamBuilder
{
public:
    StreamBuilder(std::vector<Region> const & regions, std::uint64_t elements_per_page,
                  std::vector<PageId> & out)
        : regions_(regions), epp_(elements_per_page), out_(out)
    {
    }

    void touch(std::size_t operand, std::uint64_t element)
    {
        out_.push_back(PageId{regions_[operand].base.value + element / epp_});
    }

    void touch_page(std::size_t operand, std::uint64_t page_offset)
    {
        out_.push_back(PageId{regions_[operand].base.value + page_offset});
    }

private:
    std::vector<Region> const & regions_;
    std::uint64_t epp_;
    std::vector<PageId> & out_;
};

// Emits the canonical loop nest restricted to outer iterations [begin, end).
void emit_block(WorkloadSpec const & spec, std::vector<Region> const & regions,
                std::uint64_t begin, std::uint64_t end, std::vector<PageId> & out)
{
    StreamBuilder s(regions, spec.elements_per_page, out);
    auto const & d = spec.dims;
    switch (spec.kind) {
    case WorkloadKind::DotProd:
        for (auto i = begin; i < end; ++i) {
            s.touch(0, i);
            s.touch(1, i);
        }
        break;
    case WorkloadKind::MatVecMul: {
        auto cols = d.size() == 2 ? d[1] : d[0];
        for (auto i = begin; i < end; ++i) {
            for (std::uint64_t j = 0; j < cols; ++j) {
                s.touch(0, i * cols + j);
                s.touch(1, j);
                s.touch(2, i);
            }
        }
        break;
    }
    case WorkloadKind::MatMul: {
        auto k_dim = d.size() == 3 ? d[1] : d[0];
        auto n_dim = d.size() == 3 ? d[2] : d[0];
        for (auto i = begin; i < end; ++i) {
            for (std::uint64_t j = 0; j < n_dim; ++j) {
                for (std::uint64_t k = 0; k < k_dim; ++k) {
                    s.touch(0, i * k_dim + k);
                    s.touch(1, k * n_dim + j);
                    s.touch(2, i * n_dim + j);
                }
            }
        }
        break;
    }
    case WorkloadKind::SparseMul: {
        // Row-by-row Gustavson product C = A * B with a dense C.
        auto n = d[0];
        auto nnz = sparse_row_nnz(n);
        auto a_cols = sparse_pattern(n, spec.seed);
        auto b_cols = sparse_pattern(n, spec.seed ^ 0x5bd1e9955bd1e995ULL);
        for (auto i = begin; i < end; ++i) {
            s.touch(0, i);
            for (auto p = i * nnz; p < (i + 1) * nnz; ++p) {
                s.touch(1, p);
                auto k = a_cols[p];
                s.touch(2, k);
                for (auto q = k * nnz; q < (k + 1) * nnz; ++q) {
                    s.touch(3, q);
                    s.touch(4, i * n + b_cols[q]);
                }
            }
        }
        break;
    }
    case WorkloadKind::StridedScan:
        for (auto i = begin; i < end; ++i)
            s.touch(0, i * d[1]);
        break;
    case WorkloadKind::SeqScan:
        for (auto i = begin; i < end; ++i)
            s.touch(0, i);
        break;
    case WorkloadKind::RandomOblivious: {
        auto pages = regions[0].pages;
        std::mt19937_64 rng(spec.seed);
        std::vector<std::uint64_t> perm(pages);
        for (std::uint64_t pass = 0; pass < end; ++pass) {
            std::iota(perm.begin(), perm.end(), std::uint64_t{0});
            for (auto i = pages; i > 1; --i)
                std::swap(perm[i - 1], perm[rng() % i]);
            if (pass < begin)
                continue;
            for (auto p : perm)
                s.touch_page(0, p);
        }
        break;
    }
    }
}

} // namespace

std::string_view to_string(WorkloadKind kind)
{
    for (auto const & [k, name] : kKindNames) {
        if (k == kind)
            return name;
    }
    return "unknown";
}

WorkloadKind parse_workload_kind(std::string_view name)
{
    for (auto const & [k, n] : kKindNames) {
        if (n == name)
            return k;
    }
    throw InvalidParameter("unknown workload kind '" + std::string(name) + "'");
}

std::uint64_t AccessStream::total_accesses() const
{
    std::uint64_t total = 0;
    for (auto const & t : per_thread)
        total += t.size();
    return total;
}

std::vector<std::string_view> operand_names(WorkloadKind kind)
{
    switch (kind) {
    case WorkloadKind::DotProd:
        return {"x", "y"};
    case WorkloadKind::MatVecMul:
        return {"A", "x", "y"};
    case WorkloadKind::MatMul:
        return {"A", "B", "C"};
    case WorkloadKind::SparseMul:
        return {"A_rowptr", "A_nz", "B_rowptr", "B_nz", "C"};
    case WorkloadKind::StridedScan:
    case WorkloadKind::SeqScan:
    case WorkloadKind::RandomOblivious:
        return {"data"};
    }
    return {};
}

std::vector<Region> layout_regions(WorkloadSpec const & spec)
{
    if (spec.elements_per_page == 0)
        throw InvalidParameter("elements_per_page must be positive");
    if (spec.threads == 0)
        throw InvalidParameter("threads must be positive");

    auto shape = shape_of(spec);
    auto names = operand_names(spec.kind);
    if (!spec.region_bases.empty() && spec.region_bases.size() != names.size())
        throw InvalidParameter("region_bases must list one base per operand");

    std::vector<Region> regions;
    std::uint64_t next = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        Region r;
        r.name = std::string(names[i]);
        r.elements = shape.elements[i];
        r.pages = ceil_div(r.elements, spec.elements_per_page);
        r.base = spec.region_bases.empty() ? PageId{next} : spec.region_bases[i];
        next = checked_add(r.base.value, r.pages);
        regions.push_back(std::move(r));
    }

    std::vector<Region const *> sorted;
    for (auto const & r : regions)
        sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](auto a, auto b) { return a->base < b->base; });
    std::uint64_t end = 0;
    for (auto const * r : sorted) {
        if (r->base.value < end)
            throw InvalidParameter("operand regions overlap");
        end = checked_add(r->base.value, r->pages);
    }
    if (spec.address_space_pages && *spec.address_space_pages < end)
        throw InvalidParameter("regions exceed the declared address space");
    return regions;
}

std::uint64_t outer_iterations(WorkloadSpec const & spec)
{
    return shape_of(spec).outer;
}

bool is_partitionable(WorkloadKind kind)
{
    return kind != WorkloadKind::RandomOblivious;
}

AccessStream partition_static(WorkloadSpec const & spec, std::uint32_t threads)
{
    auto regions = layout_regions(spec);
    auto outer = outer_iterations(spec);
    if (threads == 0)
        throw InvalidParameter("thread count must be positive");
    if (threads > 1 && !is_partitionable(spec.kind))
        throw InvalidParameter(std::string(to_string(spec.kind)) +
                               " does not support static partitioning");
    if (threads > outer)
        throw InvalidParameter("more threads than outer iterations");

    AccessStream stream;
    stream.address_space_pages = spec.address_space_pages.value_or(0);
    for (auto const & r : regions)
        stream.address_space_pages =
            std::max(stream.address_space_pages, r.base.value + r.pages);

    stream.per_thread.resize(threads);
    auto quotient = outer / threads;
    auto remainder = outer % threads;
    std::uint64_t begin = 0;
    for (std::uint32_t t = 0; t < threads; ++t) {
        auto end = begin + quotient + (t < remainder ? 1 : 0);
        emit_block(spec, regions, begin, end, stream.per_thread[t]);
        begin = end;
    }
    return stream;
}

AccessStream gen_stream(WorkloadSpec const & spec)
{
    return partition_static(spec, spec.threads);
}

std::uint64_t footprint_pages(AccessStream const & stream)
{
    std::unordered_set<PageId> seen;
    for (auto const & t : stream.per_thread)
        seen.insert(t.begin(), t.end());
    return seen.size();
}

void to_json(nlohmann::json & j, WorkloadSpec const & spec)
{
    j = nlohmann::json{
        {"kind", std::string(to_string(spec.kind))},
        {"dims", spec.dims},
        {"elements_per_page", spec.elements_per_page},
        {"threads", spec.threads},
        {"seed", spec.seed},
    };
    if (!spec.region_bases.empty()) {
        auto bases = nlohmann::json::array();
        for (auto b : spec.region_bases)
            bases.push_back(b.value);
        j["region_bases"] = std::move(bases);
    }
    if (spec.address_space_pages)
        j["address_space_pages"] = *spec.address_space_pages;
}

void from_json(nlohmann::json const & j, WorkloadSpec & spec)
{
    spec = WorkloadSpec{};
    spec.kind = parse_workload_kind(j.at("kind").get<std::string>());
    spec.dims = j.at("dims").get<std::vector<std::uint64_t>>();
    spec.elements_per_page = j.value("elements_per_page", std::uint64_t{1});
    spec.threads = j.value("threads", std::uint32_t{1});
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("region_bases")) {
        for (auto b : j.at("region_bases").get<std::vector<std::uint64_t>>())
            spec.region_bases.push_back(PageId{b});
    }
    if (j.contains("address_space_pages"))
        spec.address_space_pages = j.at("address_space_pages").get<std::uint64_t>();
}

WorkloadSpec load_workload_spec(std::string const & path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open workload spec '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        return j.get<WorkloadSpec>();
    } catch (nlohmann::json::exception const & e) {
        throw InvalidParameter("invalid workload spec '" + path + "': " + e.what());
    }
}

} // namespace pagelab
