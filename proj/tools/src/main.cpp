#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "shoeprint/error.hpp"

namespace {

int fail(const char* kind, const char* what, int code) {
  std::fprintf(stderr, "%s: %s\n", kind, what);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "shoeprint-lab: synthetic shoeprint cohorts, age and gender models, and the\n"
      "pressure-trend analytics around them"};
  app.require_subcommand(1);
  shoeprint::cli::register_synth(app);
  shoeprint::cli::register_train(app);
  shoeprint::cli::register_eval(app);
  shoeprint::cli::register_baseline(app);
  shoeprint::cli::register_analyze(app);
  shoeprint::cli::register_gradcheck(app);

  // Exit contract: 0 success, 1 verification failure, 2 usage or configuration
  // error, 3 I/O failure.
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const shoeprint::VerificationError& e) {
    return fail("verification failure", e.what(), 1);
  } catch (const shoeprint::ConfigError& e) {
    return fail("configuration error", e.what(), 2);
  } catch (const shoeprint::ShapeError& e) {
    return fail("shape error", e.what(), 2);
  } catch (const shoeprint::IoError& e) {
    return fail("i/o error", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("internal error", e.what(), 1);
  }
  return 0;
}
