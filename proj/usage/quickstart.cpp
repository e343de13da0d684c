#include <iostream>

#include "fairmat/fairmat.hpp"

using namespace fairmat;

int main() {
    const Instance inst = gallery("ex2").instance;

    const auto eat = mech_eating(inst);
    std::cout << "eating:\n" << io::pi_json(eat.pi).dump(2) << "\n";

    const auto lottery = decompose(inst, eat.pi);
    std::cout << "support size " << lottery.support.size() << "\n";
    std::cout << "sd-efficient " << is_sd_efficient(inst, eat.pi).efficient << "\n";
    std::cout << "sd-envy-free " << is_sd_envy_free(inst, lottery).all_satisfied() << "\n";

    const auto naive = mech_naive_ps(inst);
    const auto report = is_sd_envy_free(inst, decompose(inst, naive.pi));
    if (const auto* v = report.find(0, 1); v && !v->satisfied)
        std::cout << "naive ps: agent 0 envies agent 1 at prefix ending " << inst.items[*v->witness].label << "\n";

    const auto c = certify_thm4_nonexistence();
    std::cout << "non-matroid pair certified: "
              << cert::check_nonexistence(c.instance, c.support, c.infeasibility).ok << "\n";
}
