//! Closed-form asymptotics, the critical set, saddle data and a numerical
//! check of the residue integral.

pub mod gamma;
pub mod predict;
pub mod residue;
pub mod saddle;
pub mod symbolic;

pub use gamma::{gamma_set, GammaOrder, GammaPoint, GammaSet};
pub use predict::{predict, predict_with_second_order, AsymptoticPrediction, ClassPrediction, SecondOrder, Theorem};
pub use residue::{residue_integral_estimate, QuadratureSpec, ResidueEstimate};
pub use saddle::{log_s_bar_second_derivative, saddle_data, second_order_main, SaddleData};
pub use symbolic::{ExactConstant, Quad};
