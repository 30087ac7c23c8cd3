#include "criteria.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  const std::filesystem::path config_path =
      argc > 1 ? std::filesystem::path(argv[1])
               : std::filesystem::path(BSMIMO_SOURCE_DIR) / "configs" / "hand_scenario.json";
  try
  {
    const auto shipped = bsmimo::load_config(config_path);
    int failed = 0;
    bsmimo::acceptance::run_all(shipped, [&](const bsmimo::acceptance::Outcome& o) {
      std::cout << bsmimo::acceptance::format_line(o) << std::endl;
      failed += !o.passed;
    });
    std::cout << (failed ? std::to_string(failed) + " of 8 criteria failed" : "all 8 criteria passed") << '\n';
    return failed ? 1 : 0;
  }
  catch (const std::exception& e)
  {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 2;
  }
}
