use std::marker::PhantomData;
use std::ops::Range;

/// A slice handed between jobs as a pointer and length.
///
/// Parallel steps hand out sub-ranges of one array to several jobs at once
/// and later re-split the same memory along other boundaries; borrowck cannot
/// follow that, so jobs carry raw sub-slices and each job materializes only
/// the range it owns.
pub(crate) struct RawSlice<'s, T> {
    ptr: *mut T,
    len: usize,
    _marker: PhantomData<&'s mut [T]>,
}

impl<T> Clone for RawSlice<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for RawSlice<'_, T> {}

// SAFETY: a RawSlice is only dereferenced by the job that owns the covered
// range; ownership passes between threads through the job queue's mutex.
unsafe impl<T: Send> Send for RawSlice<'_, T> {}
unsafe impl<T: Send> Sync for RawSlice<'_, T> {}

impl<'s, T> RawSlice<'s, T> {
    pub fn new(slice: &'s mut [T]) -> Self {
        Self { ptr: slice.as_mut_ptr(), len: slice.len(), _marker: PhantomData }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn sub(&self, range: Range<usize>) -> Self {
        assert!(range.start <= range.end && range.end <= self.len);
        // SAFETY: in bounds per the assertion
        Self { ptr: unsafe { self.ptr.add(range.start) }, len: range.len(), _marker: PhantomData }
    }

    /// # Safety
    /// No other live reference may overlap the slice while the result is used.
    #[allow(clippy::mut_from_ref)]
    pub unsafe fn get_mut(&self) -> &'s mut [T] {
        std::slice::from_raw_parts_mut(self.ptr, self.len)
    }

    /// # Safety
    /// No live mutable reference may overlap the slice while the result is used.
    pub unsafe fn get(&self) -> &'s [T] {
        std::slice::from_raw_parts(self.ptr, self.len)
    }

    /// # Safety
    /// `i` in bounds and no other access to element `i` at the same time.
    #[inline(always)]
    pub unsafe fn write(&self, i: usize, value: T) {
        debug_assert!(i < self.len);
        self.ptr.add(i).write(value);
    }
}

/// Heap buffer shared by the jobs of one step, each touching its own range.
pub(crate) struct OwnedRaw<T> {
    ptr: *mut T,
    len: usize,
}

// SAFETY: as for RawSlice; the buffer is freed only when the last job drops
// its reference to the owning step.
unsafe impl<T: Send> Send for OwnedRaw<T> {}
unsafe impl<T: Send> Sync for OwnedRaw<T> {}

impl<T> OwnedRaw<T> {
    pub fn new(values: Vec<T>) -> Self {
        let boxed = values.into_boxed_slice();
        let len = boxed.len();
        Self { ptr: Box::into_raw(boxed) as *mut T, len }
    }

    pub fn raw(&self) -> RawSlice<'_, T> {
        RawSlice { ptr: self.ptr, len: self.len, _marker: PhantomData }
    }
}

impl<T> Drop for OwnedRaw<T> {
    fn drop(&mut self) {
        // SAFETY: reconstructs the box leaked in `new`
        unsafe { drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(self.ptr, self.len))) }
    }
}
