mod oracles;
mod support;
