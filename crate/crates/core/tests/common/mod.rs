pub mod navier;
