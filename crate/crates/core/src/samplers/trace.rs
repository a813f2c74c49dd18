//! Chain output with per-step metadata, and its CSV export.

use ndarray::{Array2, ArrayView1, ArrayView2};
use std::io::{self, Write};

#[derive(Debug, Clone)]
pub struct Trace {
    dim: usize,
    samples: Vec<f64>,
    pub accepted: Vec<bool>,
    pub delta_h: Vec<f64>,
    /// Cumulative count of true-gradient (grad U) evaluations after each step.
    pub grad_evals_cum: Vec<u64>,
    /// Measured per-step wall time. Written to CSV only on request, since
    /// timing is inherently nondeterministic.
    pub wall_ms: Vec<f64>,
}

impl Trace {
    pub fn with_capacity(dim: usize, steps: usize) -> Self {
        Trace {
            dim,
            samples: Vec::with_capacity(dim * steps),
            accepted: Vec::with_capacity(steps),
            delta_h: Vec::with_capacity(steps),
            grad_evals_cum: Vec::with_capacity(steps),
            wall_ms: Vec::with_capacity(steps),
        }
    }

    pub fn push(
        &mut self,
        theta: ArrayView1<f64>,
        accepted: bool,
        delta_h: f64,
        grad_evals_cum: u64,
        wall_ms: f64,
    ) {
        debug_assert_eq!(theta.len(), self.dim);
        self.samples.extend(theta.iter());
        self.accepted.push(accepted);
        self.delta_h.push(delta_h);
        self.grad_evals_cum.push(grad_evals_cum);
        self.wall_ms.push(wall_ms);
    }

    pub fn len(&self) -> usize {
        self.accepted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accepted.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples as a T x dim view.
    pub fn samples(&self) -> ArrayView2<f64> {
        ArrayView2::from_shape((self.len(), self.dim), &self.samples).unwrap()
    }

    /// Rows from `start` on, as an owned matrix.
    pub fn samples_from(&self, start: usize) -> Array2<f64> {
        self.samples().slice(ndarray::s![start.., ..]).to_owned()
    }

    pub fn acceptance_rate(&self, from: usize) -> f64 {
        let n = self.len().saturating_sub(from);
        if n == 0 {
            return 0.0;
        }
        self.accepted[from..].iter().filter(|&&a| a).count() as f64 / n as f64
    }

    /// Cumulative wall time at each step, in seconds.
    pub fn elapsed_s(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.wall_ms
            .iter()
            .map(|ms| {
                acc += ms / 1000.0;
                acc
            })
            .collect()
    }

    /// CSV with header step,theta_0..theta_{d-1},accepted,delta_H,
    /// grad_evals_cum,wall_ms. With `include_walltime` off the wall_ms
    /// column is written as 0 so identical runs produce identical bytes.
    pub fn write_csv<W: Write>(&self, mut w: W, include_walltime: bool) -> io::Result<()> {
        write!(w, "step")?;
        for j in 0..self.dim {
            write!(w, ",theta_{}", j)?;
        }
        writeln!(w, ",accepted,delta_H,grad_evals_cum,wall_ms")?;
        for t in 0..self.len() {
            write!(w, "{}", t + 1)?;
            for j in 0..self.dim {
                write!(w, ",{}", self.samples[t * self.dim + j])?;
            }
            let wall = if include_walltime { self.wall_ms[t] } else { 0.0 };
            writeln!(
                w,
                ",{},{},{},{}",
                self.accepted[t] as u8, self.delta_h[t], self.grad_evals_cum[t], wall
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn tiny_trace() -> Trace {
        let mut tr = Trace::with_capacity(2, 2);
        tr.push(array![1.0, 2.0].view(), true, 0.1, 3, 5.0);
        tr.push(array![0.5, -1.0].view(), false, -0.2, 3, 6.0);
        tr
    }

    #[test]
    fn csv_layout_and_determinism() {
        let tr = tiny_trace();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "step,theta_0,theta_1,accepted,delta_H,grad_evals_cum,wall_ms"
        );
        assert_eq!(lines.next().unwrap(), "1,1,2,1,0.1,3,0");
        assert_eq!(lines.next().unwrap(), "2,0.5,-1,0,-0.2,3,0");

        let mut with_time = Vec::new();
        tr.write_csv(&mut with_time, true).unwrap();
        assert!(String::from_utf8(with_time).unwrap().contains(",5"));
    }

    #[test]
    fn acceptance_rate_and_views() {
        let tr = tiny_trace();
        assert_eq!(tr.acceptance_rate(0), 0.5);
        assert_eq!(tr.acceptance_rate(1), 0.0);
        assert_eq!(tr.samples().dim(), (2, 2));
        assert_eq!(tr.samples_from(1).dim(), (1, 2));
    }
}
