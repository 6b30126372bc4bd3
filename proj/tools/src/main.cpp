#include <iostream>

#include <CLI11.hpp>

#include "tgk/error.hpp"
#include "tgk_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted tensor Golub-Kahan-Tikhonov deblurring"};
  int exit_code = 0;
  tgk::cli::add_commands(app, exit_code);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
