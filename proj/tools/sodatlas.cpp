#include "CLI11.hpp"
#include "sodatlas/acceptance.hpp"
#include "sodatlas/arithmetic.hpp"
#include "sodatlas/catalog.hpp"
#include "sodatlas/equivariant.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

using namespace sodatlas;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Stanza find_stanza(const std::vector<Stanza>& all, const std::string& section, const std::string& path)
{
    for (const auto& st : all)
        if (st.section == section)
            return st;
    throw ParseError(path + ": no [" + section + "] stanza");
}

// [surface] base = P2 | F<d>, blowups = [k1, ...], fibration = point | conic <fibre> | curve <genus>.
MoriFibreSpace read_surface(const std::string& path)
{
    const Stanza st = find_stanza(parse_stanzas(read_file(path)), "surface", path);
    const std::string base = trim_copy(st.require("base"));
    const std::string blowups = trim_copy(st.get("blowups").value_or(""));
    const SurfaceModel s = parse_surface_spec(base + (blowups.empty() ? "" : " " + blowups));
    const std::string fib = trim_copy(st.get("fibration").value_or("point"));
    if (fib == "point")
        return MoriFibreSpace{s, BaseKind::Point, 0, std::nullopt};
    if (fib.rfind("conic", 0) == 0) {
        try {
            return MoriFibreSpace{s, BaseKind::RationalCurve, 0, DivisorNames(s).parse(fib.substr(5))};
        } catch (const LatticeError& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
    if (fib.rfind("curve", 0) == 0) {
        try {
            return MoriFibreSpace{s, BaseKind::Curve, std::stol(fib.substr(5)), std::nullopt};
        } catch (const std::logic_error&) {
            throw ParseError(path + ": curve fibration needs a genus");
        }
    }
    throw ParseError(path + ": fibration must be point, conic <fibre> or curve <genus>");
}

// [collection] surface = P2 [3], optional "name X = expr" lines, blocks = < ... >.
Collection read_collection(const std::string& path)
{
    const Stanza st = find_stanza(parse_stanzas(read_file(path)), "collection", path);
    auto s = std::make_shared<const SurfaceModel>(parse_surface_spec(st.require("surface")));
    DivisorNames names(*s);
    for (const auto& [key, value] : st.entries)
        if (key.rfind("name ", 0) == 0) {
            try {
                names.define(trim_copy(key.substr(5)), names.parse(value));
            } catch (const LatticeError& e) {
                throw ParseError(path + ": " + e.what());
            }
        }
    return parse_collection(st.require("blocks"), s, names);
}

std::size_t search_depth(std::size_t fallback)
{
    if (const char* env = std::getenv("SODATLAS_DEPTH")) {
        try {
            const long v = std::stol(env);
            if (v >= 0)
                return static_cast<std::size_t>(v);
        } catch (const std::logic_error&) {
        }
        throw InputError("SODATLAS_DEPTH must be a nonnegative integer");
    }
    return fallback;
}

void print_collection(const Collection& c)
{
    const auto rep = check_collection(c);
    std::cout << "  " << format_collection(c) << "\n";
    for (const auto& row : rep.gram)
        std::cout << "    " << format_vec(row) << "\n";
    for (const auto& v : rep.violations)
        std::cout << "  violation: " << v << "\n";
    std::cout << "  " << (rep.ok ? "semi-orthogonal" : "NOT semi-orthogonal") << (rep.full ? ", full" : ", not full") << "\n";
}

SurfaceModel model_of_degree(int d)
{
    if (d == 9)
        return SurfaceModel::projective_plane();
    if (d == 8)
        return SurfaceModel::hirzebruch(0);
    if (d >= 1 && d <= 7)
        return SurfaceModel::projective_plane({9 - d});
    throw InputError("degree must be between 1 and 9");
}

int cmd_classes(int degree, long r, const std::string& surface)
{
    const SurfaceModel s = surface.empty() ? model_of_degree(degree) : parse_surface_spec(surface);
    const auto classes = enumerate_r_classes(s, r);
    std::cout << s.describe() << ", r = " << r << "\n";
    for (const auto& c : classes)
        std::cout << "  " << format_divisor(s, c) << "\n";
    std::cout << classes.size() << " classes\n";
    return 0;
}

int cmd_sod(const std::string& path)
{
    const MoriFibreSpace m = read_surface(path);
    const Collection c = standard_sod(m);
    std::cout << m.surface.describe() << (birationally_rich(m) ? ", birationally rich" : ", not birationally rich") << "\n";
    print_collection(c);
    return 0;
}

int cmd_mutate(const std::string& coll, const std::string& script, const std::string& target)
{
    const Collection start = read_collection(coll);
    std::cout << "step 0: start\n";
    print_collection(start);
    if (!target.empty()) {
        const Collection goal = read_collection(target);
        if (goal.model() != start.model())
            throw InputError("target collection lives on a different surface");
        SearchOptions opt;
        opt.max_depth = search_depth(opt.max_depth);
        const auto path = search_path(start, goal, opt);
        if (!path) {
            std::cout << "no path within depth " << opt.max_depth << "\n";
            return kExitFail;
        }
        Collection cur = start;
        for (std::size_t i = 0; i < path->size(); ++i) {
            cur = apply_move(cur, (*path)[i]);
            std::cout << "step " << i + 1 << ": " << format_move((*path)[i]) << "\n";
            print_collection(cur);
        }
        std::cout << "path of length " << path->size() << " found\n";
        return 0;
    }
    const auto moves = parse_moves(read_file(script));
    Collection cur = start;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        std::cout << "step " << i + 1 << ": " << format_move(moves[i]) << "\n";
        try {
            cur = apply_move(cur, moves[i]);
        } catch (const MutationError& e) {
            std::cout << "  failed: " << e.what() << "\n";
            return kExitFail;
        }
        print_collection(cur);
    }
    return 0;
}

int cmd_verify(const std::vector<std::string>& ids_in, bool all, const std::string& out_dir, unsigned jobs)
{
    const std::vector<std::string> ids = all ? catalog_ids() : ids_in;
    if (ids.empty())
        throw InputError("give --id or --all");
    for (const auto& id : ids)
        link_script(id);
    std::vector<Certificate> certs(ids.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            certs[i] = verify_link(ids[i]);
    } else {
        for (std::size_t start = 0; start < ids.size(); start += jobs) {
            std::vector<std::future<Certificate>> batch;
            for (std::size_t i = start; i < std::min(ids.size(), start + jobs); ++i)
                batch.push_back(std::async(std::launch::async, [&, i] { return verify_link(ids[i]); }));
            for (std::size_t k = 0; k < batch.size(); ++k)
                certs[start + k] = batch[k].get();
        }
    }
    if (!out_dir.empty())
        std::filesystem::create_directories(out_dir);
    std::size_t failed = 0;
    for (const auto& c : certs) {
        if (!out_dir.empty()) {
            std::ofstream f(std::filesystem::path(out_dir) / (c.id + ".jsonl"));
            f << c.to_jsonl();
        }
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << " (" << c.steps.size() << " steps";
        if (c.rotation)
            std::cout << ", rotation " << *c.rotation;
        if (c.serre_claim_checked)
            std::cout << ", serre power " << (c.serre_power ? std::to_string(*c.serre_power) : "none");
        std::cout << ")\n";
        if (!c.pass) {
            ++failed;
            std::cout << "  " << c.failure << "\n";
            for (const auto& s : c.steps)
                if (!s.ok)
                    std::cout << "  step " << s.index << " '" << s.move << "': " << s.detail << "\n";
        }
    }
    std::cout << certs.size() - failed << " of " << certs.size() << " links verified\n";
    return failed ? kExitFail : 0;
}

void print_h1(const GroupAction& g)
{
    try {
        std::cout << "H1(G, Pic): " << h1_picard(g).describe() << "\n";
    } catch (const EquivariantError& e) {
        std::cout << "H1(G, Pic): skipped (" << e.what() << ")\n";
    }
}

int cmd_group(const std::string& path)
{
    const GroupAction g = parse_group_action(read_file(path));
    const SurfaceModel& s = g.surface();
    std::cout << s.describe() << ", group of order " << g.order() << "\n";
    std::cout << "invariant rank: " << invariant_rank(g) << "\n";
    if (s.degree() > 0) {
        const auto os = orbits(g, enumerate_r_classes(s, -1));
        std::cout << "orbits of (-1)-classes: " << os.size() << "\n";
        for (const auto& o : os) {
            std::cout << "  [" << o.size() << "]";
            for (const auto& c : o)
                std::cout << " " << format_divisor(s, c);
            std::cout << "\n";
        }
    }
    print_h1(g);
    const auto mp = minimality_proxy(g);
    std::cout << "minimal (numerical proxy): " << (mp.minimal ? "yes" : "no");
    if (!mp.minimal)
        std::cout << ", " << mp.contractible_orbits.size() << " contractible orbit(s)";
    std::cout << "\n";
    return 0;
}

int cmd_atoms(const std::string& surface, const std::string& action, const std::string& contraction)
{
    const MoriFibreSpace m = read_surface(surface);
    auto g = std::make_shared<const GroupAction>(parse_group_action(read_file(action)));
    if (g->surface() != m.surface)
        throw InputError("group action and surface files describe different lattices");
    const Contraction c = parse_contraction(read_file(contraction), m.surface);
    const auto atoms = atom_multiset(g, c);
    for (const auto& a : atoms)
        std::cout << "  " << a.describe() << "\n";
    std::cout << atoms.size() << " atoms\n";
    return 0;
}

int cmd_invariant(const std::string& steps, const std::string& action)
{
    std::shared_ptr<const GroupAction> g;
    if (!action.empty())
        g = std::make_shared<const GroupAction>(parse_group_action(read_file(action)));
    std::cout << burnside_invariant(parse_birational_steps(read_file(steps), g)).describe() << "\n";
    return 0;
}

int cmd_profile(const std::string& path)
{
    const auto profiles = parse_profiles(read_file(path));
    if (profiles.empty())
        throw ParseError(path + ": no [atoms] stanza");
    bool failed = false;
    for (const auto& [name, p] : profiles) {
        std::cout << (name.empty() ? "profile" : name) << " " << format_profile(p) << "\n";
        const bool rich = is_rich_profile(p);
        std::cout << "  rational: " << (is_rational_profile(p) ? "yes" : "no") << ", birationally rich: " << (rich ? "yes" : "no")
                  << "\n";
        if (!rich)
            continue;
        std::cout << "  |DAm| = " << dam_order(p) << "\n";
        if (p.amitsur_order && p.surface_index) {
            const bool ok = index_formula_check(p);
            failed = failed || !ok;
            std::cout << "  index formula " << *p.surface_index << " * " << *p.amitsur_order << " = " << dam_order(p) << ": "
                      << (ok ? "holds" : "FAILS") << "\n";
        }
        std::vector<long> degrees;
        for (const auto& a : p.atoms)
            degrees.push_back(a.field_degree);
        std::sort(degrees.begin(), degrees.end());
        if (degrees == std::vector<long>{1, 2, 3})
            for (const auto& w : dp6_consistency(p)) {
                std::cout << "  warning: " << w << "\n";
                failed = true;
            }
    }
    return failed ? kExitFail : 0;
}

int cmd_selftest()
{
    int failed = 0;
    for (const auto& r : run_acceptance()) {
        std::cout << format_criterion(r) << "\n";
        failed += !r.pass;
    }
    std::cout << 12 - failed << " of 12 criteria pass\n";
    return failed ? kExitFail : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical derived categories of rational surfaces"};
    app.require_subcommand(1);

    int degree = 0;
    long r = -1;
    std::string surface, path, script, target, out_dir = "certificates", action, contraction;
    std::vector<std::string> ids;
    bool all = false;
    unsigned jobs = 1;

    auto* classes = app.add_subcommand("classes", "enumerate r-classes");
    classes->add_option("--degree", degree, "del Pezzo degree (1-9)");
    classes->add_option("--r", r, "self-intersection")->required();
    classes->add_option("--surface", surface, "surface spec such as \"P2 [1, 2]\"");

    auto* sod = app.add_subcommand("sod", "standard decomposition of a Mori fibre space");
    sod->add_option("--surface", path, "surface file")->required()->check(CLI::ExistingFile);

    auto* mutate = app.add_subcommand("mutate", "replay a mutation script");
    mutate->add_option("--collection", path, "collection file")->required()->check(CLI::ExistingFile);
    auto* s_opt = mutate->add_option("--script", script, "move script file")->check(CLI::ExistingFile);
    auto* t_opt = mutate->add_option("--target", target, "search for a path to this collection")->check(CLI::ExistingFile);
    s_opt->excludes(t_opt);

    auto* verify = app.add_subcommand("verify-link", "verify catalog links and write certificates");
    auto* id_opt = verify->add_option("--id", ids, "catalog id (repeatable)");
    auto* all_opt = verify->add_flag("--all", all, "verify every catalog link");
    id_opt->excludes(all_opt);
    verify->add_option("--out", out_dir, "certificate directory (empty to skip)");
    verify->add_option("--jobs", jobs, "cases verified concurrently")->check(CLI::Range(1u, 64u));

    auto* group = app.add_subcommand("group", "invariants of a group action");
    group->add_option("--action", path, "group file")->required()->check(CLI::ExistingFile);

    auto* atoms = app.add_subcommand("atoms", "atom multiset of a contraction");
    atoms->add_option("--surface", path, "surface file")->required()->check(CLI::ExistingFile);
    atoms->add_option("--action", action, "group file")->required()->check(CLI::ExistingFile);
    atoms->add_option("--contraction", contraction, "contraction file")->required()->check(CLI::ExistingFile);

    auto* invariant = app.add_subcommand("invariant", "Burnside invariant of a step list");
    invariant->add_option("--steps", path, "steps file")->required()->check(CLI::ExistingFile);
    invariant->add_option("--action", action, "group file for concrete orbits")->check(CLI::ExistingFile);

    auto* profile = app.add_subcommand("profile", "arithmetic checks on atom profiles");
    profile->add_option("--file", path, "profile file")->required()->check(CLI::ExistingFile);

    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (classes->parsed()) {
            if (surface.empty() && degree == 0)
                throw InputError("give --degree or --surface");
            return cmd_classes(degree, r, surface);
        }
        if (sod->parsed())
            return cmd_sod(path);
        if (mutate->parsed()) {
            if (script.empty() && target.empty())
                throw InputError("give --script or --target");
            return cmd_mutate(path, script, target);
        }
        if (verify->parsed())
            return cmd_verify(ids, all, out_dir, jobs);
        if (group->parsed())
            return cmd_group(path);
        if (atoms->parsed())
            return cmd_atoms(path, action, contraction);
        if (invariant->parsed())
            return cmd_invariant(path, action);
        if (profile->parsed())
            return cmd_profile(path);
        if (selftest->parsed())
            return cmd_selftest();
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
